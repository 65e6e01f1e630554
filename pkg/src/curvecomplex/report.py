"""Machine-readable output: versioned JSON reports and CSV trajectory tables.

Reports are byte-deterministic: stable key order, no timestamps, and the
evaluation order never leaks into the output.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from math import inf

from . import __version__
from .asymptotics import ClassificationReport

SCHEMA = "curvecomplex.report.v1"


def _interval(v):
    if v == "inf":
        return {"lo": "inf", "hi": "inf"}
    return {"lo": v.lo, "hi": "inf" if v.hi == inf else v.hi}


def _classification(c):
    out = {"kind": c.kind}
    if c.bound is not None:
        out["bound"] = c.bound
    if c.slope is not None:
        out["slope"] = str(c.slope)
    return out


def _trajectory(t):
    return {
        "classification": _classification(t.classification),
        "values": [
            {"n": n, "lo": lo, "hi": hi} for (n, lo, hi) in t.rows()
        ],
    }


def _curve_verdict(cv):
    out = {
        "name": cv.curve_name,
        "verdict": cv.kind,
    }
    if cv.witness_side:
        out["witness_side"] = cv.witness_side
    if cv.reason:
        out["reason"] = cv.reason
    if cv.wrapping is not None:
        out["wrapping"] = {
            "w": cv.wrapping.w,
            "s_slope": str(cv.wrapping.s_slope),
            "residual": str(cv.wrapping.residual),
            "verified": cv.wrapping.verified,
        }
    out["trajectories"] = {
        key: _trajectory(cv.trajectories[key])
        for key in sorted(cv.trajectories)
    }
    return out


def report_payload(scenario, results):
    """results: list of (sequence_name, ClassificationReport)."""
    seqs = []
    for sname, rep in sorted(results, key=lambda p: p[0]):
        seqs.append(
            {
                "name": sname,
                "verdict": rep.verdict,
                "condition_a": {
                    "classification": _classification(rep.condition_a),
                    "values": [
                        {
                            "n": n,
                            "lo": rep.condition_a_values[n].lo,
                            "hi": "inf"
                            if rep.condition_a_values[n].hi == inf
                            else rep.condition_a_values[n].hi,
                        }
                        for n in sorted(rep.condition_a_values)
                    ],
                },
                "curves": [_curve_verdict(cv) for cv in rep.curves],
                "witness_notes": rep.witness_notes,
            }
        )
    return {
        "schema": SCHEMA,
        "tool_version": __version__,
        "conventions": {
            "twist": "right Dehn twist; 0/1 maps to 1/1 under the twist about 1/0",
            "nonannular_ambiguity_radius": 2,
            "annular_error_radius": 1,
            "classifier": scenario.config.as_dict(),
            "witness_family": (
                "collar(d), essential non-pants pieces of d, pieces of d with "
                "the disjoint basepoint curves, plus declared witnesses; "
                "reported m-values are certified lower bounds of the supremum"
            ),
        },
        "scenario": {
            "name": scenario.name,
            "surface": {
                "genus": scenario.surface.genus,
                "punctures": scenario.surface.punctures,
            },
            "source_sha256": hashlib.sha256(
                scenario.source_text.encode()
            ).hexdigest(),
        },
        "sequences": seqs,
    }


def to_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


CSV_METRICS = ("m+", "m-", "mna+", "mna-")


def to_csv(scenario, results) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["sequence", "curve", "n", "metric", "lo", "hi"])
    for sname, rep in sorted(results, key=lambda p: p[0]):
        for cv in rep.curves:
            for metric in CSV_METRICS:
                traj = cv.trajectories.get(metric)
                if traj is None:
                    continue
                for (n, lo, hi) in traj.rows():
                    writer.writerow([sname, cv.curve_name, n, metric, lo, hi])
    return buf.getvalue()
