"""Subsurface projections and coarse distances with certified intervals.

Non-annular projections surger one arc of the curve with push-offs of the
subsurface boundary; the surgered curve is assembled as the boundary walk of
the ribbon graph (arc + boundary circles), which is canonical because its
junctions are trivalent.  Annular projections count signed wraps of strands
through the two-triangle collar.

Distances: complexity-one worlds are exact (Farey); collars are exact up to
the +-1 wrap ambiguity; anything else gets an honest interval whose upper
bound comes from intersection numbers when they are affordable and is
infinite otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import inf

from . import moves
from .curves import (
    CurveError,
    Marking,
    Multicurve,
    intersection_number,
    marking_curves,
    short_data,
)
from .itinerary import itinerary_coords
from .kernel import Triangulation, norm_label
from .kernel import validate as kernel_validate
from .pieces import CutSystem, PieceError, cut_system
from .strands import ShortPosition, StrandError, next_state, step
from .strands import components as strand_components


class MetricError(Exception):
    pass


AMBIGUITY_NONANNULAR = 2  # spread of the surgery choices, <= 4 repo-wide
TWIST_ERROR = 1


@dataclass(frozen=True)
class CoarseDistance:
    """Certified interval around a curve-complex distance."""

    lo: int
    hi: object  # int or math.inf

    def __post_init__(self):
        if self.hi != inf and self.lo > self.hi:
            raise MetricError(f"empty distance interval [{self.lo}, {self.hi}]")

    @property
    def exact(self) -> bool:
        return self.hi == self.lo

    def __str__(self):
        hi = "inf" if self.hi == inf else str(self.hi)
        return f"[{self.lo}, {hi}]"


INFINITE = CoarseDistance(0, inf)  # placeholder bounds for "no upper bound"


@dataclass(frozen=True)
class SubsurfaceSpec:
    """An essential subsurface: a collar annulus, a complement region, or
    the whole surface."""

    kind: str  # "annular" | "nonannular" | "ambient"
    boundary: Multicurve  # the core for annular, the cut multicurve else
    selector: int = 0

    @classmethod
    def annular(cls, core: Multicurve) -> "SubsurfaceSpec":
        if not core.is_single_curve():
            raise MetricError("annular subsurface needs a single core curve")
        return cls("annular", core, 0)

    @classmethod
    def complement_piece(cls, boundary: Multicurve, selector: int) -> "SubsurfaceSpec":
        return cls("nonannular", boundary, selector)

    @classmethod
    def ambient(cls, tri: Triangulation) -> "SubsurfaceSpec":
        empty = Multicurve.__new__(Multicurve)
        object.__setattr__(empty, "tri", tri)
        object.__setattr__(empty, "coords", (0,) * tri.num_edges)
        object.__setattr__(empty, "_components", [])
        return cls("ambient", empty, 0)

    @property
    def is_annular(self) -> bool:
        return self.kind == "annular"

    @property
    def is_ambient(self) -> bool:
        return self.kind == "ambient"

    def cut(self) -> CutSystem:
        return cut_system(self.boundary.tri, self.boundary)

    def region(self):
        return self.cut().regions[self.selector]

    def contains_in_boundary(self, d: Multicurve) -> bool:
        """True iff the curve d is part of this subsurface's frontier."""
        if self.is_annular:
            return d.coords == self.boundary.coords
        comps = [c.coords for c in self.boundary.component_curves()]
        if d.coords not in comps:
            return False
        idx = comps.index(d.coords)
        return idx in self.region().bounding_components()

    def describe(self) -> str:
        if self.is_ambient:
            return f"ambient({self.boundary.tri.surface})"
        if self.is_annular:
            return f"collar{self.boundary.coords}"
        r = self.region()
        return (
            f"piece#{self.selector}(g={r.genus},ends={r.ends})"
            f" of {self.boundary.coords}"
        )


def complement_pieces(m: Multicurve):
    """Collar annuli of the components plus the essential non-pants regions.

    The empty multicurve yields the whole surface, matching the convention
    that nothing was cut."""
    if m.is_empty:
        return [SubsurfaceSpec.ambient(m.tri)]
    m.check_analysis_ready()
    out = [SubsurfaceSpec.annular(c) for c in m.component_curves()]
    cs = cut_system(m.tri, m)
    for idx, region in enumerate(cs.regions):
        if not region.is_pants and region.complexity >= 1:
            out.append(SubsurfaceSpec.complement_piece(m, idx))
    return out


@dataclass(frozen=True)
class Projection:
    """Image of a multicurve in a subsurface's curve complex."""

    kind: str  # "empty" | "curve" | "twist"
    curve: Multicurve = None
    ambiguity_radius: int = 0
    twist: int = 0
    error_radius: int = 0

    @classmethod
    def empty(cls):
        return cls("empty")

    @classmethod
    def of_curve(cls, curve: Multicurve, ambiguity: int):
        if ambiguity > 4:
            raise MetricError("ambiguity radius above the repo-wide bound 4")
        return cls("curve", curve=curve, ambiguity_radius=ambiguity)

    @classmethod
    def of_twist(cls, twist: int, error: int = TWIST_ERROR):
        if error > 1:
            raise MetricError("twist error radius above 1")
        return cls("twist", twist=twist, error_radius=error)

    @property
    def is_empty(self):
        return self.kind == "empty"


# -- annular projections -------------------------------------------------------


def collar_position(d: Multicurve) -> tuple:
    """(flips, ShortPosition) carrying d's collar to its two-triangle chart."""
    flips, st, sw = short_data(d.tri, d.coords)
    return flips, ShortPosition(st, sw)


def strand_wrap(d: Multicurve, x) -> int | None:
    """Signed wrap count of the first transversal strand of x through
    collar(d), or None when x misses d."""
    flips, sp = collar_position(d)
    _, (xv,) = moves.transport(d.tri, flips, [x])
    return sp.first_transversal_wrap(xv)


_wrap_sign_cache: dict = {}


def collar_wrap_sign(d: Multicurve) -> int:
    """Orientation of the wrap counter: +1 when the right twist about d
    increases it.  Calibrated once per collar against the twist move."""
    key = (d.tri.triangles, d.coords)
    got = _wrap_sign_cache.get(key)
    if got is not None:
        return got
    flips, sp = collar_position(d)
    st = sp.tri
    from .curves import enumerate_curves

    probe = None
    for max_len in (8, 10, 12):
        for cand in enumerate_curves(st, max_length=max_len, limit=128):
            if sp.core_intersection(list(cand.coords)) > 0:
                probe = cand.coords
                break
        if probe is not None:
            break
    if probe is None:
        raise MetricError("no transversal probe found for wrap calibration")
    w0 = sp.first_transversal_wrap(list(probe))
    img = moves.twist_move(st, sp.core).apply(list(probe), 5)
    w1 = sp.first_transversal_wrap(img)
    if w1 is None or w0 is None or w1 == w0:
        raise MetricError("wrap calibration failed")
    sign = 1 if w1 > w0 else -1
    _wrap_sign_cache[key] = sign
    return sign


def relative_twist(d: Multicurve, x: Multicurve, ref) -> int:
    """Relative twisting of x versus ref about d, exact up to +-1.

    Normalized so that relative_twist(D_d^k(y), y) is k up to the error."""
    wx = strand_wrap(d, x.coords)
    if wx is None:
        raise MetricError("curve misses the annulus")
    for r in marking_curves(ref):
        wr = strand_wrap(d, r.coords)
        if wr is not None:
            return collar_wrap_sign(d) * (wx - wr)
    raise MetricError("basepoint misses annulus")


def project_annular(d: Multicurve, c: Multicurve, ref) -> Projection:
    """Relative twisting integer of c versus ref about d (error <= 1)."""
    if not d.is_single_curve():
        raise MetricError("annular projection needs a single core curve")
    if intersection_number(d.tri, c.coords, d.coords) == 0:
        return Projection.empty()
    return Projection.of_twist(relative_twist(d, c, ref))


def annular_distance(d: Multicurve, x: Multicurve, y) -> CoarseDistance:
    """Coarse distance in C(collar(d)) between the projections of x and y."""
    y_curves = marking_curves(y)
    if any(x.coords == yc.coords for yc in y_curves):
        return CoarseDistance(0, 0)
    tau = relative_twist(d, x, y)
    return CoarseDistance(max(1, abs(tau) - 1), abs(tau) + 2)


# -- non-annular projections ----------------------------------------------------


def _collar_slot_of(cs: CutSystem, t_index: int):
    """(component index, its ShortPosition) when t_index is a collar triangle."""
    info = cs.arc_info.get(t_index)
    if info is None:
        return None
    return info[0], cs.collars[info[0]]


def _exit_region(cs: CutSystem, slot_label: int) -> int:
    """Region entered when a strand leaves a collar through `slot_label`."""
    from .pieces import TAIL

    cell = cs._cell_of_segment(~slot_label, TAIL)
    return cs.region_of_cell[cell]


def _circle_fragment(cs: CutSystem, comp: int, t_entry: int, chirality: int):
    """Full push-off circuit of collar `comp` starting and ending in t_entry.

    Returns the crossing itinerary [A, B]: A exits t_entry through a rung,
    B crosses back.  `chirality` in {1, 2} picks the rung; both choices give
    mirror traversals of the same circle.
    """
    sp = cs.collars[comp]
    st = cs.short_tri
    tpl = st.triangles[t_entry]
    rung_slots = [s for s, lab in enumerate(tpl) if norm_label(lab) in (sp.f, sp.g)]
    if len(rung_slots) != 2:
        raise MetricError("collar triangle misses its rungs")
    boundary_slot = 3 - rung_slots[0] - rung_slots[1]
    a_slot = (boundary_slot + chirality) % 3
    a_label = tpl[a_slot]
    t_other = st.side[~a_label][0]
    other_tpl = st.triangles[t_other]
    b_cands = [
        lab
        for lab in other_tpl
        if norm_label(lab) in (sp.f, sp.g) and lab != ~a_label
    ]
    if len(b_cands) != 1:
        raise MetricError("collar circuit is not transversal")
    b_label = b_cands[0]
    if st.side[~b_label][0] != t_entry:
        raise MetricError("collar circuit does not close")
    return [a_label, b_label]


def _first_arc(cs: CutSystem, region_index: int, c_short, max_arcs: int = 8):
    """Deterministic arcs of the multicurve c through the given region.

    Yields (itinerary, start_comp, end_comp): the itinerary's first label
    leaves the collar of start_comp, its last label enters the collar of
    end_comp, and everything in between stays in the region (or hugs a
    collar without crossing its core).
    """
    st = cs.short_tri
    emitted = 0
    region = cs.regions[region_index]
    for comp_index, sp in enumerate(cs.collars):
        if comp_index not in region.bounding_components():
            continue
        starts = []
        for from_c in (True, False):
            for entry_lo, _ in sp.transversal_entries(c_short, from_c):
                exit_slot, exit_rank, _ = sp.run_strand(c_short, entry_lo, from_c)
                if _exit_region(cs, exit_slot) == region_index:
                    starts.append((exit_slot, exit_rank))
        for exit_slot, exit_rank in starts:
            itinerary = [exit_slot]
            lab, rank = next_state(exit_slot, exit_rank)
            budget = 2_000_000
            end_comp = None
            while True:
                t_index = st.side[lab][0]
                info = cs.arc_info.get(t_index)
                if info is not None:
                    comp2 = info[0]
                    sp2 = cs.collars[comp2]
                    entered = lab
                    if entered not in (sp2.c_label, sp2.d_label):
                        raise MetricError("entered a collar off its boundary slots")
                    e_slot, e_rank, _ = sp2.run_strand(
                        c_short, rank, from_c=(entered == sp2.c_label)
                    )
                    if e_slot != entered:
                        end_comp = comp2
                        break  # transversal passage: the arc stops here
                    # hugging passage: replay it crossing by crossing
                    lab2, rank2 = entered, rank
                    while True:
                        out, out_rank = step(st, c_short, lab2, rank2)
                        itinerary.append(out)
                        lab2, rank2 = next_state(out, out_rank)
                        if cs.arc_info.get(st.side[lab2][0]) is None:
                            break
                        budget -= 1
                        if budget <= 0:
                            raise MetricError("arc trace exceeded budget")
                    lab, rank = lab2, rank2
                    continue
                out, out_rank = step(st, c_short, lab, rank)
                itinerary.append(out)
                lab, rank = next_state(out, out_rank)
                budget -= 1
                if budget <= 0:
                    raise MetricError("arc trace exceeded budget")
            yield itinerary, comp_index, end_comp
            emitted += 1
            if emitted >= max_arcs:
                return


def _surgery_candidates(cs: CutSystem, itinerary, comp_start, comp_end):
    """Closed itineraries of the surgered curves for one arc.

    Feet are identified by (component, boundary slot): the same collar seen
    from its two sides counts as two different frontier circles.
    """
    st = cs.short_tri
    first, last = itinerary[0], itinerary[-1]
    t_start = st.side[first][0]
    t_end = st.side[~last][0]
    rev = [~lab for lab in reversed(itinerary)]
    out = []
    if (comp_start, first) != (comp_end, ~last):
        # band sum around both frontier circles
        for chir in (1, 2):
            circle_end = _circle_fragment(cs, comp_end, t_end, chir)
            circle_start = _circle_fragment(cs, comp_start, t_start, chir)
            out.append(itinerary + circle_end + rev + circle_start)
    else:
        if t_start != t_end:
            raise MetricError("same-slot feet in different collar triangles")
        out.append(list(itinerary))  # short petal: close the arc directly
        out.append(itinerary + _circle_fragment(cs, comp_end, t_end, 1))
        out.append(itinerary + _circle_fragment(cs, comp_end, t_end, 2))
    return out


def project_nonannular(W: SubsurfaceSpec, c: Multicurve) -> Projection:
    """Surgered image of c in the non-annular subsurface W."""
    if W.is_annular:
        raise MetricError("use project_annular for collar subsurfaces")
    cs = W.cut()
    region = cs.regions[W.selector]
    tri = W.boundary.tri
    if intersection_number(tri, c.coords, W.boundary.coords) == 0:
        comps = [x.coords for x in W.boundary.component_curves()]
        if c.coords in comps:
            return Projection.empty()
        c_short = cs.to_short(c.coords)
        carrier = None
        for comp, _ in strand_components(cs.short_tri, c_short):
            if comp in [tuple(x) for x in cs.short_comps]:
                continue
            try:
                where = cs.locate(comp)
            except PieceError:
                continue
            if where == W.selector:
                carrier = comp
                break
        if carrier is None:
            return Projection.empty()
        return Projection.of_curve(
            Multicurve(tri, cs.from_short(carrier)), 0
        )
    c_short = cs.to_short(c.coords)
    boundary_comps = set(cs.short_comps)
    links = set(cs.short_tri.vertex_links())
    best = None
    for itinerary, comp_s, comp_e in _first_arc(cs, W.selector, c_short):
        for cand in _surgery_candidates(cs, itinerary, comp_s, comp_e):
            coords = itinerary_coords(cs.short_tri, cand)
            if not any(coords):
                continue
            if coords in links or coords in boundary_comps:
                continue
            if not kernel_validate(cs.short_tri, coords):
                continue
            comps = strand_components(cs.short_tri, coords)
            if len(comps) != 1 or comps[0][1] != 1:
                continue
            if intersection_number(cs.short_tri, coords, cs.boundary_short_vector()) != 0:
                continue
            try:
                if cs.locate(coords) != W.selector:
                    continue
            except PieceError:
                continue
            if best is None or coords < best:
                best = coords
        if best is not None:
            break
    if best is None:
        raise MetricError("no essential surgered curve found for projection")
    return Projection.of_curve(
        Multicurve(tri, cs.from_short(best)), AMBIGUITY_NONANNULAR
    )


def project_to(W: SubsurfaceSpec, thing, ref=None) -> Projection:
    """Project a Multicurve or Marking into W (annular needs ref)."""
    curves = marking_curves(thing) if not isinstance(thing, Multicurve) else [thing]
    if W.is_annular:
        d = W.boundary
        for x in curves:
            if intersection_number(d.tri, x.coords, d.coords) != 0:
                if ref is None:
                    raise MetricError("annular projection needs a basepoint")
                return project_annular(d, x, ref)
        return Projection.empty()
    for x in curves:
        pr = project_nonannular(W, x)
        if not pr.is_empty:
            return pr
    return Projection.empty()


# -- coarse distance -------------------------------------------------------------


INTERSECTION_BUDGET = 200_000


def _affordable_intersection(tri, x, y):
    if min(sum(x), sum(y)) > INTERSECTION_BUDGET:
        return None
    try:
        return intersection_number(tri, x, y)
    except (moves.MoveError, StrandError):
        return None


def coarse_distance(W: SubsurfaceSpec, a, b, ref=None) -> CoarseDistance:
    """Interval around d_W(a, b); exact on collars and complexity-one pieces."""
    pa = a if isinstance(a, Projection) else project_to(W, a, ref)
    pb = b if isinstance(b, Projection) else project_to(W, b, ref)
    if pa.is_empty or pb.is_empty:
        raise MetricError("projection is empty; caller must handle infinity")
    if W.is_annular:
        if pa.kind == "twist" and pb.kind == "twist":
            tau = abs(pa.twist - pb.twist)
            err = pa.error_radius + pb.error_radius
            if tau == 0 and err == 0:
                return CoarseDistance(0, 0)
            return CoarseDistance(max(0, tau - err - 1), tau + err + 1)
        raise MetricError("annular distance needs twist projections")
    # distance between the chosen representatives is exact where we can
    # compute it; the choice ambiguity is reported on the projections
    x, y = pa.curve, pb.curve
    if x.coords == y.coords:
        return CoarseDistance(0, 0)
    cs = W.cut()
    region = cs.regions[W.selector]
    if region.complexity == 1:
        chart = cs.chart(W.selector)
        xs = Multicurve(cs.short_tri, cs.to_short(x.coords))
        ys = Multicurve(cs.short_tri, cs.to_short(y.coords))
        d = chart.distance(xs, ys)
        return CoarseDistance(d, d)
    i_xy = _affordable_intersection(x.tri, x.coords, y.coords)
    if i_xy == 0:
        return CoarseDistance(1, 1)
    lo = 2
    hi = inf if i_xy is None else max(lo, 2 * i_xy + 1)
    return CoarseDistance(lo, hi)


def subsurface_distance(W: SubsurfaceSpec, c, mu) -> CoarseDistance | None:
    """d_W(c, mu) with the paper's conventions; None encodes +infinity."""
    try:
        pc = project_to(W, c, ref=mu)
        pm = project_to(W, mu, ref=mu)
    except MetricError:
        return None
    if pc.is_empty or pm.is_empty:
        return None
    if W.is_annular and pc.kind == "twist":
        # the basepoint's own projection is the zero of the twist chart
        tau = abs(pc.twist)
        return CoarseDistance(max(0, tau - TWIST_ERROR - 1), tau + TWIST_ERROR + 1)
    return coarse_distance(W, pc, pm)


# -- equivariant slope actions ------------------------------------------------------


class SlopeAction:
    """Exact action of a mapping-class word on a complexity-one piece chart.

    Twists about curves carried by the piece act on slopes as integral
    parabolic matrices; a word whose letters all live inside the piece acts
    by the product.  Projection commutes with such words exactly (surgery is
    homeomorphism-equivariant), so huge word-images project by matrix
    arithmetic instead of strand tracing.
    """

    def __init__(self, W: SubsurfaceSpec, word):
        from .curves import BlockLetter, TwistLetter

        self.W = W
        self.cs = W.cut()
        self.chart = self.cs.chart(W.selector)
        self._matrix_cache = {}
        self.letters = self._compile(word)

    def _compile(self, word):
        from .curves import BlockLetter, TwistLetter

        out = []
        for letter in word.letters:
            if isinstance(letter, TwistLetter):
                mat = self._twist_matrix(letter.curve)
                out.append(("twist", mat, letter.exp))
            else:
                sub = self._compile(letter.word)
                out.append(("block", sub, letter.exp))
        return out

    def _twist_matrix(self, curve_coords):
        got = self._matrix_cache.get(curve_coords)
        if got is not None:
            return got
        cs, chart = self.cs, self.chart
        tri = self.W.boundary.tri
        if intersection_number(tri, curve_coords, self.W.boundary.coords) != 0:
            raise MetricError("twist curve crosses the piece boundary")
        short = cs.to_short(curve_coords)
        if cs.locate(short) != self.W.selector:
            raise MetricError("twist curve is not carried by the piece")
        t_short = Multicurve(cs.short_tri, short)
        p, q = chart.slope(t_short)
        probe = chart.u_zero if (p, q) != (0, 1) else chart.u_inf
        from .curves import AffineExpr, MappingClassWord, TwistLetter, apply_word

        img = apply_word(
            MappingClassWord((TwistLetter(curve_coords, AffineExpr(0, 1)),)),
            0,
            Multicurve(tri, cs.from_short(probe.coords)),
        )
        img_slope = chart.slope(Multicurve(cs.short_tri, cs.to_short(img.coords)))
        x = chart.slope(probe)
        for eps in (1, -1):
            k = eps * chart.delta  # sphere-type pieces twist by double steps
            mat = (1 + k * p * q, -k * p * p, k * q * q, 1 - k * p * q)
            if _apply_mat(mat, x) == img_slope:
                self._matrix_cache[curve_coords] = mat
                return mat
        raise MetricError("twist slope-matrix calibration failed")

    def matrix(self, n: int):
        return _word_matrix(self.letters, n)


def _apply_mat(m, slope):
    a, b, c, d = m
    p, q = slope
    pp, qq = a * p + b * q, c * p + d * q
    if qq < 0 or (qq == 0 and pp < 0):
        pp, qq = -pp, -qq
    from math import gcd

    g = gcd(abs(pp), abs(qq))
    return (pp // g, qq // g) if g else (pp, qq)


def _mat_mul(x, y):
    a, b, c, d = x
    e, f, g, h = y
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def _mat_pow(m, k):
    if k < 0:
        a, b, c, d = m
        m = (d, -b, -c, a)  # SL2 inverse
        k = -k
    out = (1, 0, 0, 1)
    base = m
    while k:
        if k & 1:
            out = _mat_mul(out, base)
        base = _mat_mul(base, base)
        k >>= 1
    return out


def _word_matrix(compiled, n):
    out = (1, 0, 0, 1)
    for kind, payload, exp in compiled:
        k = exp(n)
        if kind == "twist":
            m = _mat_pow(payload, k)
        else:
            m = _mat_pow(_word_matrix(payload, 1), k)  # block letters are n-free inside
        out = _mat_mul(out, m)
    return out


# -- whole-surface distances -------------------------------------------------------

_ambient_charts: dict = {}


def ambient_chart(tri: Triangulation):
    """Exact slope chart when the whole surface has complexity one."""
    key = tri.triangles
    chart = _ambient_charts.get(key)
    if chart is not None:
        return chart
    if tri.surface.complexity != 1:
        raise MetricError("ambient chart needs a complexity-one surface")
    from .curves import enumerate_curves
    from .farey import FareyChart

    catalogue = enumerate_curves(tri, max_length=8)
    want = 1 if tri.surface.genus == 1 else 2
    u_inf = catalogue[0]
    u_zero = next(c for c in catalogue[1:] if c.intersection(u_inf) == want)
    u_aux = next(
        c
        for c in catalogue
        if c.intersection(u_inf) >= want and c.intersection(u_zero) >= want
        and c.intersection(u_inf) % want == 0 and c.intersection(u_zero) % want == 0
    )
    chart = FareyChart.from_refs(u_inf, u_zero, u_aux)
    _ambient_charts[key] = chart
    return chart


COMPONENT_BUDGET = 60_000


def _component_handles(x: Multicurve):
    """Components when enumerable, otherwise the whole multicurve as one
    coarse vertex (Lemma 2.1 holds for multicurves, so this stays sound)."""
    if sum(x.coords) <= COMPONENT_BUDGET:
        try:
            return x.component_curves()
        except StrandError:
            pass
    return [x]


def _contains_component(tri, whole, part) -> bool:
    """True iff the single curve `part` is a component of `whole`."""
    if whole == part:
        return True
    rest = tuple(w - p for w, p in zip(whole, part))
    if any(r < 0 for r in rest):
        return False
    if not kernel_validate(tri, rest):
        return False
    return _affordable_intersection(tri, rest, part) == 0


def surface_distance(x: Multicurve, y, pool=()) -> CoarseDistance:
    """Interval around d_{C(S)}(x, y) between multicurves or markings.

    Exact on complexity-one surfaces.  Elsewhere the lower bound is the
    crossing obstruction and the upper bound is the best path through the
    supplied curve pool, with Lemma-2.1-style edge weights.
    """
    tri = x.tri
    xs = _component_handles(x)
    ys = marking_curves(y)
    for b in ys:
        if _contains_component(tri, x.coords, b.coords):
            return CoarseDistance(0, 0)
    if tri.surface.complexity == 1:
        chart = ambient_chart(tri)
        best = min(farey_dist_cached(chart, a, b) for a in xs for b in ys)
        return CoarseDistance(best, best)
    lo = 1
    if len(xs) == 1 and len(ys) == 1 and sum(x.coords) <= COMPONENT_BUDGET:
        if xs[0].is_single_curve() and ys[0].is_single_curve():
            if _affordable_intersection(tri, xs[0].coords, ys[0].coords):
                lo = 2
    hi = inf
    nodes = []
    seen = set()
    for c in list(xs) + list(ys) + list(pool):
        if c.coords not in seen:
            seen.add(c.coords)
            nodes.append(c)
    import heapq

    index = {c.coords: i for i, c in enumerate(nodes)}
    sources = [index[a.coords] for a in xs]
    targets = {index[b.coords] for b in ys}
    dist = {s: 0 for s in sources}
    heap = [(0, s) for s in sources]
    while heap:
        dcur, i = heapq.heappop(heap)
        if dist.get(i, inf) < dcur:
            continue
        if i in targets:
            hi = dcur
            break
        for j in range(len(nodes)):
            if j == i:
                continue
            ij = _affordable_intersection(tri, nodes[i].coords, nodes[j].coords)
            if ij is None:
                continue
            w = 1 if ij == 0 else 2 * ij + 1
            nd = dcur + w
            if nd < dist.get(j, inf):
                dist[j] = nd
                heapq.heappush(heap, (nd, j))
    if any(
        _affordable_intersection(tri, a.coords, b.coords) == 0
        for a in xs
        for b in ys
    ):
        hi = 1
    if hi != inf:
        hi = max(hi, lo)
        lo = min(lo, hi)
    return CoarseDistance(lo, hi)


_farey_cache: dict = {}


def farey_dist_cached(chart, a: Multicurve, b: Multicurve) -> int:
    from .farey import farey_distance

    key = (id(chart), a.coords, b.coords)
    got = _farey_cache.get(key)
    if got is None:
        got = farey_distance(chart.slope(a), chart.slope(b))
        if len(_farey_cache) > 65536:
            _farey_cache.clear()
        _farey_cache[key] = got
    return got


def gromov_product_bound(a: Multicurve, b: Multicurve, mu, pool=()) -> CoarseDistance:
    """Interval for the Gromov product (a|b)_mu in C(S).

    Bounded products over a sequence certify condition (a): geodesics
    between the pair stay near the basepoint.
    """
    d_am = surface_distance(a, mu, pool)
    d_bm = surface_distance(b, mu, pool)
    d_ab = surface_distance(a, b, pool)
    if d_am.hi == inf or d_bm.hi == inf:
        hi = inf
    else:
        hi = (d_am.hi + d_bm.hi - d_ab.lo + 1) // 2
    lo = max(0, (d_am.lo + d_bm.lo - (0 if d_ab.hi == inf else d_ab.hi)) // 2)
    if hi != inf:
        hi = max(hi, lo)
    return CoarseDistance(lo, hi)


# -- Behrstock property -----------------------------------------------------------


def overlaps(Y: SubsurfaceSpec, Z: SubsurfaceSpec) -> bool:
    """True when the two subsurfaces overlap (neither disjoint nor nested)."""
    tri = Y.boundary.tri
    by, bz = Y.boundary.coords, Z.boundary.coords
    if Y.is_annular and Z.is_annular:
        return intersection_number(tri, by, bz) != 0
    if intersection_number(tri, by, bz) != 0:
        return True
    if Y.is_annular and not Z.is_annular:
        cz = Z.cut()
        try:
            return cz.locate(cz.to_short(by)) == Z.selector and not Z.contains_in_boundary(Y.boundary)
        except PieceError:
            return False
    if Z.is_annular and not Y.is_annular:
        return overlaps(Z, Y)
    return False


def boundary_of(W: SubsurfaceSpec) -> Multicurve:
    if W.is_annular:
        return W.boundary
    comps = W.boundary.component_curves()
    idxs = W.region().bounding_components()
    out = comps[idxs[0]]
    for i in idxs[1:]:
        out = out.union(comps[i])
    return out


def behrstock_check(Y: SubsurfaceSpec, Z: SubsurfaceSpec, mu) -> bool:
    """Conservative check of: d_Y(mu, bZ) >= 10 implies d_Z(mu, bY) <= 4."""
    if not overlaps(Y, Z):
        raise MetricError("subsurfaces do not overlap")
    d1 = subsurface_distance(Y, boundary_of(Z), mu)
    if d1 is None or d1.lo < 10:
        return True
    d2 = subsurface_distance(Z, boundary_of(Y), mu)
    if d2 is None:
        return False
    return d2.hi <= 4
