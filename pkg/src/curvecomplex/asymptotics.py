"""n-parametrized sequences of multicurve pairs and their classification.

For a sequence pair (c_n^+, c_n^-) and a test curve d, four trajectories are
tracked: the full invariants m(c_n^+-, d, mu) (supremum of subsurface
distances over the witness family, infinite when the curve misses d) and
their non-annular restrictions.  Growth on both sides flags a wrapped
parabolic; the wrapping number is extracted from the affine growth of the
relative twists and re-verified by untwisting both sides.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import inf

from .curves import Marking, MappingClassWord, Multicurve, apply_word, intersection_number
from .kernel import Triangulation
from .metrics import (
    CoarseDistance,
    MetricError,
    SubsurfaceSpec,
    annular_distance,
    relative_twist,
    subsurface_distance,
)
from .pieces import PieceError, cut_system


class AnalysisError(Exception):
    pass


INFINITE_VALUE = "inf"  # explicit marker for d_W = +infinity in trajectories


@dataclass(frozen=True)
class ClassifierConfig:
    """Decision thresholds for 'eventually bounded', echoed in reports."""

    band: int = 8
    residual: Fraction = Fraction(1, 10)
    min_samples: int = 8

    def as_dict(self):
        return {
            "band": self.band,
            "residual": str(self.residual),
            "min_samples": self.min_samples,
        }


@dataclass(frozen=True)
class Classification:
    kind: str  # "eventually_bounded" | "unbounded" | "undetermined"
    bound: int | None = None
    slope: Fraction | None = None

    @property
    def bounded(self):
        return self.kind == "eventually_bounded"

    @property
    def unbounded(self):
        return self.kind == "unbounded"

    def describe(self):
        if self.bounded:
            return f"eventually_bounded(<= {self.bound})"
        if self.unbounded:
            s = "inf" if self.slope is None else str(self.slope)
            return f"unbounded(slope {s})"
        return "undetermined"


@dataclass
class Trajectory:
    """Sampled values of one invariant, with the classifier's verdict."""

    values: dict  # n -> CoarseDistance or INFINITE_VALUE
    classification: Classification

    def rows(self):
        out = []
        for n in sorted(self.values):
            v = self.values[n]
            if v == INFINITE_VALUE:
                out.append((n, "inf", "inf"))
            else:
                out.append((n, v.lo, "inf" if v.hi == inf else v.hi))
        return out


def _affine_fit(points):
    """Exact least-squares line through integer points; returns (a, b)."""
    n = len(points)
    sx = sum(Fraction(x) for x, _ in points)
    sy = sum(Fraction(y) for _, y in points)
    sxx = sum(Fraction(x) * x for x, _ in points)
    sxy = sum(Fraction(x) * y for x, y in points)
    det = n * sxx - sx * sx
    if det == 0:
        return Fraction(0), sy / n
    a = (n * sxy - sx * sy) / det
    b = (sy - a * sx) / n
    return a, b


def classify_trajectory(values: dict, config: ClassifierConfig) -> Classification:
    """Spec decision rule: band test on upper bounds over the last half of
    samples for boundedness, positive-slope affine fit on lower bounds for
    growth, undetermined otherwise."""
    ns = sorted(values)
    if len(ns) < config.min_samples:
        raise AnalysisError(
            f"need at least {config.min_samples} samples, got {len(ns)}"
        )
    tail = ns[len(ns) // 2:]
    tail_vals = [values[n] for n in tail]
    if any(v == INFINITE_VALUE for v in tail_vals):
        return Classification("unbounded", slope=None)
    his = [v.hi for v in tail_vals]
    if all(h != inf for h in his) and max(his) - min(his) <= config.band:
        return Classification("eventually_bounded", bound=max(his))
    los = [(n, values[n].lo) for n in tail]
    a, b = _affine_fit(los)
    if a > 0:
        max_res = max(abs(Fraction(y) - (a * x + b)) for x, y in los)
        scale = max(1, max(abs(y) for _, y in los))
        if max_res <= config.residual * scale:
            return Classification("unbounded", slope=a)
    return Classification("undetermined")


# -- sequences -----------------------------------------------------------------


@dataclass(frozen=True)
class SequenceSpec:
    """Pair of sides, each a seed multicurve moved by an n-parametrized word."""

    plus_seed: Multicurve
    plus_word: MappingClassWord
    minus_seed: Multicurve
    minus_word: MappingClassWord
    sample_set: tuple

    def __post_init__(self):
        ns = list(self.sample_set)
        if len(ns) < 8 or sorted(set(ns)) != ns:
            raise AnalysisError("sample set must be >= 8 strictly increasing values")
        if ns[-1] < 10 * ns[0]:
            raise AnalysisError("sample set must span at least one decade")
        self.plus_seed.check_analysis_ready()
        self.minus_seed.check_analysis_ready()

    def side(self, beta: str):
        if beta == "+":
            return self.plus_seed, self.plus_word
        return self.minus_seed, self.minus_word

    def evaluate(self, beta: str, n: int) -> Multicurve:
        seed, word = self.side(beta)
        return _eval_cached(self, beta, n)


_eval_store: dict = {}


def _eval_cached(seq: SequenceSpec, beta: str, n: int) -> Multicurve:
    key = (id(seq), beta, n)
    got = _eval_store.get(key)
    if got is None:
        seed, word = seq.side(beta)
        got = apply_word(word, n, seed)
        if len(_eval_store) > 4096:
            _eval_store.clear()
        _eval_store[key] = got
    return got


# -- witness families ------------------------------------------------------------


def witness_family(d: Multicurve, mu: Marking, extra=()):
    """The finite family over which m-suprema are certified.

    collar(d), the essential non-pants complementary pieces of d, the pieces
    of d joined with the mu-base components disjoint from d, plus declared
    extras (those must carry d in their frontier).
    """
    tri = d.tri
    out = [SubsurfaceSpec.annular(d)]
    seen = {("annular", d.coords, 0)}

    def add_pieces(boundary: Multicurve):
        try:
            cs = cut_system(tri, boundary)
        except PieceError:
            return
        comps = [c.coords for c in boundary.component_curves()]
        if d.coords not in comps:
            return
        want = comps.index(d.coords)
        for idx, region in enumerate(cs.regions):
            if region.is_pants or region.complexity < 1:
                continue
            if want not in region.bounding_components():
                continue
            key = ("piece", boundary.coords, idx)
            if key not in seen:
                seen.add(key)
                out.append(SubsurfaceSpec.complement_piece(boundary, idx))

    add_pieces(d)
    disjoint_base = [
        b
        for b in mu.base.component_curves()
        if b.coords != d.coords
        and intersection_number(tri, b.coords, d.coords) == 0
    ]
    if disjoint_base:
        union = d
        for b in disjoint_base:
            union = union.union(b)
        add_pieces(union)
    for W in extra:
        if not W.contains_in_boundary(d):
            raise AnalysisError(
                f"declared witness {W.describe()} does not have the test curve "
                "in its frontier"
            )
        key = (W.kind, W.boundary.coords, W.selector)
        if key not in seen:
            seen.add(key)
            out.append(W)
    return out


def m_value(c: Multicurve, d: Multicurve, mu: Marking, witnesses, non_annular=False):
    """Certified interval for m(c, d, mu) over the witness family.

    Returns INFINITE_VALUE when c misses d (the paper's convention); the
    reported interval is a lower-bound certificate for the full supremum.
    """
    if intersection_number(c.tri, c.coords, d.coords) == 0:
        return INFINITE_VALUE
    lo = hi = 0
    for W in witnesses:
        if non_annular and W.is_annular:
            continue
        val = subsurface_distance(W, c, mu)
        if val is None:
            raise AnalysisError(
                f"projection to witness {W.describe()} unexpectedly empty"
            )
        lo = max(lo, val.lo)
        hi = max(hi, val.hi)
    return CoarseDistance(lo, hi)


def m_na_value(c, d, mu, witnesses):
    return m_value(c, d, mu, witnesses, non_annular=True)


PROJECTION_BUDGET = 100_000


class SequenceProjector:
    """Per-witness evaluation strategy for d_W(c_n, mu) along a sequence.

    Small images project directly.  On complexity-one pieces preserved by
    the side's word, projection commutes with the word exactly, so the seed
    is projected once and its slope is moved by the word's Farey matrices;
    that keeps the cost polynomial in log(weight).  Witnesses supporting
    neither strategy yield None (an honest unknown).
    """

    def __init__(self, seq: SequenceSpec, mu: Marking):
        self.seq = seq
        self.mu = mu
        self._actions = {}
        self._seed_slopes = {}
        self._mu_slopes = {}

    def _key(self, W):
        return (W.kind, W.boundary.coords, W.selector)

    def _action(self, W, beta):
        from .metrics import MetricError, SlopeAction
        from .pieces import PieceError

        key = (self._key(W), beta)
        if key in self._actions:
            return self._actions[key]
        action = None
        try:
            if not W.is_annular and W.region().complexity == 1:
                _, word = self.seq.side(beta)
                action = SlopeAction(W, word)
        except (MetricError, PieceError):
            action = None
        self._actions[key] = action
        return action

    def _slopes(self, W, beta):
        from .metrics import project_nonannular, project_to

        key = (self._key(W), beta)
        if key not in self._seed_slopes:
            seed, _ = self.seq.side(beta)
            cs = W.cut()
            chart = cs.chart(W.selector)
            pr = project_nonannular(W, seed)
            if pr.is_empty:
                self._seed_slopes[key] = None
            else:
                z0 = Multicurve(cs.short_tri, cs.to_short(pr.curve.coords))
                self._seed_slopes[key] = chart.slope(z0)
        if self._key(W) not in self._mu_slopes:
            cs = W.cut()
            chart = cs.chart(W.selector)
            pm = project_to(W, self.mu)
            zm = Multicurve(cs.short_tri, cs.to_short(pm.curve.coords))
            self._mu_slopes[self._key(W)] = chart.slope(zm)
        return self._seed_slopes[key], self._mu_slopes[self._key(W)]

    def value(self, W, beta: str, n: int):
        """CoarseDistance for d_W(c_n^beta, mu), or None when unknown."""
        from .farey import farey_distance
        from .metrics import _apply_mat, subsurface_distance

        c_n = self.seq.evaluate(beta, n)
        if W.is_annular:
            return subsurface_distance(W, c_n, self.mu)
        action = self._action(W, beta)
        if action is not None:
            seed_slope, mu_slope = self._slopes(W, beta)
            if seed_slope is None:
                return None
            slope_n = _apply_mat(action.matrix(n), seed_slope)
            d = farey_distance(slope_n, mu_slope)
            return CoarseDistance(d, d)
        if sum(c_n.coords) <= PROJECTION_BUDGET:
            try:
                return subsurface_distance(W, c_n, self.mu)
            except Exception:
                pass
        bound = self._anchored_bound(W, beta, n)
        if bound is not None:
            return CoarseDistance(0, bound)
        return None

    def _word_anchors(self, beta: str):
        key = ("anchors", beta)
        if key not in self._actions:
            from .curves import TwistLetter

            _, word = self.seq.side(beta)
            tri = self.mu.tri
            found = {}

            def walk(w):
                for letter in w.letters:
                    if isinstance(letter, TwistLetter):
                        found.setdefault(letter.curve, Multicurve(tri, letter.curve))
                    else:
                        walk(letter.word)

            walk(word)
            self._actions[key] = list(found.values())
        return self._actions[key]

    def _anchored_bound(self, W, beta: str, n: int):
        """Upper bound for d_W(c_n, mu) via the projection-triple estimate.

        When the collar projection of c_n to an anchor curve y sits far from
        the frontier of W (distance >= 10), the projection of c_n to W lies
        within 4 of y's, so d_W(c_n, mu) <= 4 + d_W(y, mu)."""
        from .metrics import boundary_of, subsurface_distance

        bz = boundary_of(W)
        c_n = self.seq.evaluate(beta, n)
        for y in self._word_anchors(beta):
            if intersection_number(y.tri, y.coords, bz.coords) == 0:
                continue
            if intersection_number(y.tri, c_n.coords, y.coords) == 0:
                continue
            try:
                tau = relative_twist(y, c_n, bz)
            except Exception:
                continue
            if abs(tau) - 2 < 10:
                continue
            cache_key = ("anchor-dz", self._key(W), y.coords)
            if cache_key not in self._actions:
                try:
                    self._actions[cache_key] = subsurface_distance(W, y, self.mu)
                except Exception:
                    self._actions[cache_key] = None
            dz = self._actions[cache_key]
            if dz is not None and dz.hi != inf:
                return 4 + dz.hi
        return None

    def m_value(self, d: Multicurve, witnesses, beta: str, n: int, non_annular=False):
        c_n = self.seq.evaluate(beta, n)
        if intersection_number(c_n.tri, c_n.coords, d.coords) == 0:
            return INFINITE_VALUE
        lo, hi = 0, 0
        unknown = False
        for W in witnesses:
            if non_annular and W.is_annular:
                continue
            val = self.value(W, beta, n)
            if val is None:
                unknown = True
                continue
            lo = max(lo, val.lo)
            if hi != inf:
                hi = max(hi, val.hi)
        return CoarseDistance(lo, inf if unknown else hi)


# -- per-curve classification -----------------------------------------------------


@dataclass
class WrappingData:
    w: int
    s_slope: Fraction
    residual: Fraction
    verified: bool
    twist_plus: dict
    twist_minus: dict


@dataclass
class CurveVerdict:
    curve_name: str
    kind: str  # not_parabolic | upward | downward | wrapped | condition_b_failed | undetermined
    witness_side: str = ""
    wrapping: WrappingData | None = None
    reason: str = ""
    trajectories: dict = field(default_factory=dict)

    @property
    def passes_condition_b(self) -> bool:
        return self.kind in ("not_parabolic", "upward", "downward", "wrapped")


def four_trajectories(d, seq: SequenceSpec, mu, witnesses, config, projector=None):
    if projector is None:
        projector = SequenceProjector(seq, mu)
    out = {}
    for beta in ("+", "-"):
        full, na = {}, {}
        for n in seq.sample_set:
            full[n] = projector.m_value(d, witnesses, beta, n)
            na[n] = projector.m_value(d, witnesses, beta, n, non_annular=True)
        out[f"m{beta}"] = Trajectory(full, classify_trajectory(full, config))
        out[f"mna{beta}"] = Trajectory(na, classify_trajectory(na, config))
    return out


def wrapping_number(d, seq: SequenceSpec, mu, config) -> WrappingData | str:
    """Solve condition (b)(ii): the integer w and twist scale s_n.

    Fits the relative twists of both sides about d; returns the string
    "no_integer_w" when the two slopes coincide (the tau^3 failure branch).
    """
    tp, tm = {}, {}
    for n in seq.sample_set:
        tp[n] = relative_twist(d, seq.evaluate("+", n), mu)
        tm[n] = relative_twist(d, seq.evaluate("-", n), mu)
    ns = sorted(tp)
    tail = ns[len(ns) // 2:]
    slope_p, _ = _affine_fit([(n, tp[n]) for n in tail])
    slope_m, _ = _affine_fit([(n, tm[n]) for n in tail])
    if slope_p == slope_m:
        return "no_integer_w"
    w_exact = slope_p / (slope_p - slope_m)
    w = round(w_exact)
    residual = abs(w_exact - w)
    if w == 0:
        s_slope = -slope_m / (w - 1)
    else:
        s_slope = -slope_p / w
    if s_slope == 0:
        return "no_integer_w"
    # verify by untwisting both sides: the substituted collar trajectories
    # must flatten out
    ok = True
    sub_p, sub_m = {}, {}
    for n in seq.sample_set:
        s_n = round(Fraction(s_slope) * n)
        up = apply_word(_twist_power(d, s_n * w), 0, seq.evaluate("+", n))
        um = apply_word(_twist_power(d, s_n * (w - 1)), 0, seq.evaluate("-", n))
        sub_p[n] = annular_distance(d, up, mu)
        sub_m[n] = annular_distance(d, um, mu)
    cp = classify_trajectory(sub_p, config)
    cm = classify_trajectory(sub_m, config)
    ok = cp.bounded and cm.bounded
    return WrappingData(
        w=w,
        s_slope=s_slope,
        residual=residual,
        verified=ok,
        twist_plus=tp,
        twist_minus=tm,
    )


def _twist_power(d: Multicurve, k: int) -> MappingClassWord:
    from .curves import AffineExpr, TwistLetter

    return MappingClassWord((TwistLetter(d.coords, AffineExpr(0, k)),))


def classify_curve(
    d: Multicurve,
    seq: SequenceSpec,
    mu: Marking,
    config: ClassifierConfig = ClassifierConfig(),
    extra_witnesses=(),
    name: str = "",
    projector=None,
) -> CurveVerdict:
    """The paper's taxonomy applied to the four trajectories of d."""
    witnesses = witness_family(d, mu, extra_witnesses)
    trajs = four_trajectories(d, seq, mu, witnesses, config, projector)
    cp, cm = trajs["m+"].classification, trajs["m-"].classification
    nap, nam = trajs["mna+"].classification, trajs["mna-"].classification

    if "undetermined" in (cp.kind, cm.kind):
        return CurveVerdict(name, "undetermined", trajectories=trajs,
                            reason="full trajectory undetermined")
    if cp.bounded and cm.bounded:
        side = "+" if (cp.bound or 0) <= (cm.bound or 0) else "-"
        return CurveVerdict(name, "not_parabolic", witness_side=side,
                            trajectories=trajs)
    if cp.unbounded and cm.bounded:
        return CurveVerdict(name, "upward", witness_side="-", trajectories=trajs)
    if cm.unbounded and cp.bounded:
        return CurveVerdict(name, "downward", witness_side="+", trajectories=trajs)
    # both unbounded: wrapped candidate, which needs both non-annular
    # trajectories eventually bounded before (b)(ii) can apply
    if not (nap.bounded and nam.bounded):
        return CurveVerdict(
            name, "condition_b_failed", trajectories=trajs,
            reason="both m-trajectories unbounded and a non-annular "
                   "trajectory is not eventually bounded",
        )
    wd = wrapping_number(d, seq, mu, config)
    if wd == "no_integer_w":
        return CurveVerdict(
            name, "condition_b_failed", trajectories=trajs,
            reason="twist slopes coincide: no integer w satisfies (b)(ii)",
        )
    if not wd.verified:
        return CurveVerdict(
            name, "condition_b_failed", wrapping=wd, trajectories=trajs,
            reason="untwisted trajectories failed to flatten",
        )
    return CurveVerdict(name, "wrapped", wrapping=wd, trajectories=trajs)


# -- the bounds-projections verdict ------------------------------------------------


@dataclass
class ClassificationReport:
    verdict: str  # "yes" | "no" | "undetermined"
    condition_a: Classification
    condition_a_values: dict
    curves: list  # CurveVerdict
    witness_notes: str
    config: ClassifierConfig

    def verdict_for(self, name: str) -> CurveVerdict:
        for cv in self.curves:
            if cv.curve_name == name:
                return cv
        raise KeyError(name)

    def upward_set(self):
        return sorted(c.curve_name for c in self.curves if c.kind == "upward")

    def downward_set(self):
        return sorted(c.curve_name for c in self.curves if c.kind == "downward")

    def wrapped_set(self):
        return sorted(c.curve_name for c in self.curves if c.kind == "wrapped")


def default_test_curves(seq: SequenceSpec, mu: Marking):
    """Seeds' components, all twist curves of the words, mu's base curves."""
    tri = mu.tri
    out = {}

    def add(curve: Multicurve, name: str):
        if curve.coords not in out:
            out[curve.coords] = name

    for tag, seed in (("plus_seed", seq.plus_seed), ("minus_seed", seq.minus_seed)):
        for i, comp in enumerate(seed.component_curves()):
            add(comp, f"{tag}[{i}]")

    def walk_word(word: MappingClassWord, prefix: str):
        from .curves import TwistLetter

        for i, letter in enumerate(word.letters):
            if isinstance(letter, TwistLetter):
                add(Multicurve(tri, letter.curve), letter.name or f"{prefix}.twist[{i}]")
            else:
                walk_word(letter.word, f"{prefix}.block[{i}]")

    walk_word(seq.plus_word, "plus")
    walk_word(seq.minus_word, "minus")
    for i, comp in enumerate(mu.base.component_curves()):
        add(comp, f"mu.base[{i}]")
    return [(name, Multicurve(tri, coords)) for coords, name in out.items()]


def condition_a_trajectory(seq: SequenceSpec, mu: Marking, pool, config):
    """Gromov-product interval per sample; bounded products certify (a)."""
    from .metrics import gromov_product_bound

    vals = {}
    for n in seq.sample_set:
        vals[n] = gromov_product_bound(
            seq.evaluate("+", n), seq.evaluate("-", n), mu, pool
        )
    return vals, classify_trajectory(vals, config)


def bounds_projections_verdict(
    seq: SequenceSpec,
    mu: Marking,
    test_curves=None,
    config: ClassifierConfig = ClassifierConfig(),
    extra_witnesses=(),
) -> ClassificationReport:
    """Decide the bounds-projections criterion on the sampled sequence.

    The global 'yes' is certified relative to the supplied test-curve set
    and the finite witness family; 'no' comes from a condition (a)
    divergence or a test curve failing both branches of condition (b).
    """
    if not mu.is_complete():
        raise AnalysisError("the coarse basepoint must be a complete marking")
    named = test_curves if test_curves else default_test_curves(seq, mu)
    if not named:
        raise AnalysisError("no test curves")

    pool = [c for _, c in named] + mu.all_curves()
    a_values, a_class = condition_a_trajectory(seq, mu, pool, config)

    projector = SequenceProjector(seq, mu)
    verdicts = []
    for name, d in named:
        verdicts.append(
            classify_curve(
                d, seq, mu, config, extra_witnesses, name=name,
                projector=projector,
            )
        )

    if a_class.unbounded:
        verdict = "no"
    elif any(v.kind == "condition_b_failed" for v in verdicts):
        verdict = "no"
    elif a_class.kind == "undetermined" or any(
        v.kind == "undetermined" for v in verdicts
    ):
        verdict = "undetermined"
    else:
        verdict = "yes"
    notes = (
        "m-values are certified lower bounds over the finite witness family; "
        "condition (b) is checked on the supplied test-curve set only"
    )
    return ClassificationReport(
        verdict=verdict,
        condition_a=a_class,
        condition_a_values=a_values,
        curves=verdicts,
        witness_notes=notes,
        config=config,
    )
