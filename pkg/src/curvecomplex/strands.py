"""Strand-level navigation of normal multicurves.

A normal multicurve crosses each edge in a totally ordered stack of points
(rank 0 .. w-1 along the edge's positive direction).  Inside a triangle the
points group into at most three parallel corner bands whose matching across
sides is an order-reversing bijection.  This module walks single strands and
contiguous rank intervals ("packets") through that structure exactly.

Ranks are arbitrary-precision integers, so the machinery is insensitive to
the size of the weights; costs scale with the number of triangles a strand
visits, not with the weights themselves.

States are pairs ``(label, rank)``: the strand is crossing edge ``|label|``
with global rank ``rank``, entering the triangle that contains ``label``.
"""

from __future__ import annotations

from .kernel import Triangulation, norm_label


class StrandError(Exception):
    pass


STEP_BUDGET = 2_000_000
TRACE_LIMIT = 4_000_000


def step(tri: Triangulation, w, label: int, rank: int):
    """One move: enter via `label` at `rank`, return the exit (slot label, rank).

    The exit label is the directed label of the side crossed on the way out;
    the strand next enters the triangle containing its partner ``~exit``.
    """
    _, m, n = tri.triangle_of(label)
    e_l = norm_label(label)
    wl, wm, wn = w[e_l], w[norm_label(m)], w[norm_label(n)]
    local = rank if label >= 0 else wl - 1 - rank
    c_ln = (wl + wn - wm) // 2  # band cutting the corner at tail(label)
    if local < c_ln:
        out, out_local = n, wn - 1 - local
    else:
        out, out_local = m, (wl - c_ln) - 1 - (local - c_ln)
    w_out = w[norm_label(out)]
    out_rank = out_local if out >= 0 else w_out - 1 - out_local
    return out, out_rank


def next_state(out_label: int, out_rank: int):
    """Entry state on the far side of the crossing just made."""
    return ~out_label, out_rank


def interval_step(tri: Triangulation, w, label: int, lo: int, hi: int):
    """Step the packet of parallel strands entering at ranks [lo, hi).

    Returns up to two pieces ``(out_label, out_lo, out_hi, reversed)`` where
    `reversed` says whether the exit ranks run opposite to the entry ranks.
    Pieces are emitted in increasing entry-rank order.  On each band the exit
    rank is an affine map  rank -> s*rank + t  with s = +-1.
    """
    _, m, n = tri.triangle_of(label)
    wl = w[norm_label(label)]
    wm, wn = w[norm_label(m)], w[norm_label(n)]
    c_ln = (wl + wn - wm) // 2

    if label >= 0:
        # local = rank; band with n at ranks [0, c_ln), band with m above.
        cuts = (
            (lo, min(hi, c_ln), n, (-1, wn - 1) if n >= 0 else (1, 0)),
            (max(lo, c_ln), hi, m, (-1, wl - 1) if m >= 0 else (1, wm - wl)),
        )
    else:
        # local = wl - 1 - rank; band with m at ranks [0, wl - c_ln).
        cut = wl - c_ln
        cuts = (
            (lo, min(hi, cut), m, (1, 0) if m >= 0 else (-1, wm - 1)),
            (max(lo, cut), hi, n, (1, wn - wl) if n >= 0 else (-1, wl - 1)),
        )
    result = []
    for a, b, out, (s, t) in cuts:
        if a >= b:
            continue
        va, vb = s * a + t, s * (b - 1) + t
        glo, ghi = (vb, va + 1) if s < 0 else (va, vb + 1)
        result.append((out, glo, ghi, s < 0))
    return result


def trace_component(tri: Triangulation, w, label: int, rank: int):
    """Trace the closed strand through (label, rank).

    Returns (per-edge crossing counts, visited entry states in both
    directions).  Cost is linear in the strand length.
    """
    counts = [0] * tri.num_edges
    visited = []
    lab, r = label, rank
    start = (label, rank)
    budget = TRACE_LIMIT
    while True:
        counts[norm_label(lab)] += 1
        visited.append((lab, r))
        out, out_rank = step(tri, w, lab, r)
        visited.append((out, out_rank))  # reverse-direction entry at the exit
        lab, r = next_state(out, out_rank)
        if (lab, r) == start:
            break
        budget -= 1
        if budget <= 0:
            raise StrandError("strand trace exceeded budget")
    return counts, visited


def components(tri: Triangulation, w):
    """Primitive components with multiplicities, ordered lexicographically.

    Returns a list of (coords tuple, multiplicity).  Requires the total
    weight to be small enough to enumerate strand by strand.
    """
    total = sum(w)
    if total == 0:
        return []
    if total > TRACE_LIMIT:
        raise StrandError(f"total weight {total} too large for strand enumeration")
    seen = set()
    found = {}
    for e in range(tri.num_edges):
        for lab in (e, ~e):
            for rank in range(w[e]):
                if (lab, rank) in seen:
                    continue
                # a trace marks both travel directions, so each strand is
                # discovered exactly once
                counts, visited = trace_component(tri, w, lab, rank)
                seen.update(visited)
                key = tuple(counts)
                found[key] = found.get(key, 0) + 1
    return [(key, found[key]) for key in sorted(found)]


# -- collar analysis at a short position -------------------------------------


class ShortPosition:
    """A single curve crossing exactly two edges once each.

    The two triangles it crosses form a simplicial collar of the curve; the
    third sides are the boundary slots c_label (in t1, the triangle seen by
    the positive label of the lower crossed edge) and d_label (in t2).  All
    collar counting (geometric intersection with the core, signed wrapping)
    happens here.
    """

    __slots__ = ("tri", "core", "f", "g", "t1", "t2", "c_label", "d_label")

    def __init__(self, tri: Triangulation, core):
        crossed = [e for e in range(tri.num_edges) if core[e]]
        if sum(core) != 2 or len(crossed) != 2:
            raise StrandError("curve is not in short position")
        f, g = crossed
        i1 = tri.side[f][0]
        i2 = tri.side[~f][0]
        if i1 == i2:
            raise StrandError("short position crosses a self-folded square")
        if {tri.side[g][0], tri.side[~g][0]} != {i1, i2}:
            raise StrandError("short position is not a two-triangle collar")
        self.tri = tri
        self.core = tuple(core)
        self.f, self.g = f, g
        self.t1, self.t2 = i1, i2
        c = [lab for lab in tri.triangles[i1] if norm_label(lab) not in (f, g)]
        d = [lab for lab in tri.triangles[i2] if norm_label(lab) not in (f, g)]
        if len(c) != 1 or len(d) != 1:
            raise StrandError("collar triangles malformed")
        self.c_label = c[0]
        self.d_label = d[0]

    def annulus_triangles(self):
        return {self.t1, self.t2}

    def is_boundary_slot(self, label: int) -> bool:
        return label == self.c_label or label == self.d_label

    def run_strand(self, w, rank: int, from_c: bool = True):
        """Trace one strand from a boundary entry until it exits the collar.

        Returns (exit_slot_label, exit_rank, signed_f_wraps).  Crossing f
        from t1 into t2 counts +1, the reverse -1.
        """
        tri = self.tri
        lab = self.c_label if from_c else self.d_label
        r = rank
        wrap = 0
        budget = STEP_BUDGET
        while True:
            out, out_rank = step(tri, w, lab, r)
            if self.is_boundary_slot(out):
                return out, out_rank, wrap
            if norm_label(out) == self.f:
                wrap += 1 if tri.side[out][0] == self.t1 else -1
            lab, r = next_state(out, out_rank)
            budget -= 1
            if budget <= 0:
                raise StrandError("collar strand trace exceeded budget")

    def _exit_packets(self, w, from_c: bool = True):
        """Push one boundary side's whole entry interval through the collar.

        Yields (entry_lo, entry_hi, exit_slot_label); entry intervals
        partition [0, w_entry) and are emitted in no particular order.
        """
        entry = self.c_label if from_c else self.d_label
        wc = w[norm_label(entry)]
        if wc == 0:
            return
        # packet: (lab, lo, hi, entry_lo, entry_hi, entry_reversed)
        stack = [(entry, 0, wc, 0, wc, False)]
        budget = STEP_BUDGET
        while stack:
            lab, lo, hi, elo, ehi, erev = stack.pop()
            pieces = interval_step(self.tri, w, lab, lo, hi)
            # pieces are in entry-rank order of the current interval
            offset = 0
            for out, glo, ghi, rev in pieces:
                n = ghi - glo
                if erev:
                    p_elo, p_ehi = ehi - offset - n, ehi - offset
                else:
                    p_elo, p_ehi = elo + offset, elo + offset + n
                offset += n
                if self.is_boundary_slot(out):
                    yield p_elo, p_ehi, out
                else:
                    stack.append((~out, glo, ghi, p_elo, p_ehi, erev ^ rev))
            budget -= 1
            if budget <= 0:
                raise StrandError("collar packet trace exceeded budget")

    def core_intersection(self, w) -> int:
        """Geometric intersection number of the core with the multicurve w."""
        return sum(
            ehi - elo for elo, ehi, out in self._exit_packets(w) if out == self.d_label
        )

    def transversal_entries(self, w, from_c: bool = True):
        """Sorted entry intervals on one boundary side whose strands cross."""
        other = self.d_label if from_c else self.c_label
        return sorted(
            (elo, ehi)
            for elo, ehi, out in self._exit_packets(w, from_c)
            if out == other
        )

    def first_transversal_wrap(self, w):
        """Signed wrap count of the lowest-rank core-crossing strand, or None."""
        runs = self.transversal_entries(w)
        if not runs:
            return None
        _, _, wrap = self.run_strand(w, runs[0][0], from_c=True)
        return wrap
