"""Cutting a surface along a multicurve: collars and complementary pieces.

The multicurve is carried to a *standard position* where every component
crosses exactly two edges once each, with pairwise disjoint collar triangle
pairs.  Cutting is then purely cellular: each collar triangle splits into a
corner cell and a big cell, and complement regions are components of the
cell adjacency graph.  Region topology (genus, boundary circles, interior
punctures) falls out of an Euler count over those cells.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import moves
from .curves import Multicurve, enumerate_curves
from .farey import FareyChart, FareyError
from .kernel import Triangulation, norm_label
from .moves import MoveError, _apply_flips
from .strands import ShortPosition, StrandError, step, next_state


class PieceError(Exception):
    pass


TAIL, HEAD = 0, 1


def _is_standard(tri: Triangulation, comps):
    """Standard position: each component short, collars disjoint, edges simple."""
    total = [0] * tri.num_edges
    used_triangles = set()
    for c in comps:
        if sum(c) != 2:
            return False
        crossed = [e for e in range(tri.num_edges) if c[e]]
        if len(crossed) != 2:
            return False
        for e in range(tri.num_edges):
            total[e] += c[e]
        f = crossed[0]
        t_pair = {tri.side[f][0], tri.side[~f][0]}
        if len(t_pair) != 2 or t_pair & used_triangles:
            return False
        used_triangles |= t_pair
    return all(x <= 1 for x in total)


def standardize_multicurve(tri: Triangulation, comps):
    """Flips carrying all components of a multicurve to standard position.

    Components are shortened one at a time; flips chosen for later
    components must not disturb the earlier ones.  Returns the flip list.
    """
    flips = []
    t = tri
    vecs = [list(c) for c in comps]

    def locked_ok(upto):
        return all(sum(vecs[j]) == 2 for j in range(upto))

    for k in range(len(vecs)):
        guard = 0
        while sum(vecs[k]) > 2:
            guard += 1
            if guard > 10000:
                raise PieceError("multicurve standardization stalled")
            best = None
            for e in range(t.num_edges):
                if vecs[k][e] == 0 or not t.is_flippable(e):
                    continue
                gains = [t.flip_weight(e, v) - v[e] for v in vecs]
                if gains[k] >= 0:
                    continue
                if any(gains[j] > 0 for j in range(k)):
                    continue
                score = (gains[k], sum(gains[:k]))
                if best is None or score < best[0]:
                    best = (score, e)
            if best is None:
                path = _plateau_search(
                    t, vecs, lambda tt, vv: sum(vv[k]) < sum(vecs[k]),
                    frozen=k,
                )
                if path is None:
                    raise PieceError(
                        "no reachable standard position for this multicurve"
                    )
                for e in path:
                    for v in vecs:
                        v[e] = t.flip_weight(e, v)
                    t = t.flip(e)
                    flips.append(e)
                continue
            e = best[1]
            for v in vecs:
                v[e] = t.flip_weight(e, v)
            t = t.flip(e)
            flips.append(e)
        if not locked_ok(k + 1):
            raise PieceError("standardization disturbed a finished component")
    if not _is_standard(t, [tuple(v) for v in vecs]):
        path = _plateau_search(
            t, vecs, lambda tt, vv: _is_standard(tt, [tuple(x) for x in vv]),
            frozen=len(vecs),
        )
        if path is None:
            raise PieceError("no reachable standard position for this multicurve")
        for e in path:
            for v in vecs:
                v[e] = t.flip_weight(e, v)
            t = t.flip(e)
            flips.append(e)
    return flips


def _plateau_search(tri, vecs, goal, frozen, limit=20000):
    """BFS over flips not increasing any weight sum; returns a flip path."""
    start = (tri.triangles, tuple(tuple(v) for v in vecs))
    seen = {start}
    frontier = [(tri, [tuple(v) for v in vecs], ())]
    while frontier:
        if len(seen) > limit:
            return None
        nxt = []
        for ct, cv, path in frontier:
            if goal(ct, cv):
                return path
            sums = [sum(v) for v in cv]
            for e in range(ct.num_edges):
                if not ct.is_flippable(e):
                    continue
                nv = []
                ok = True
                for j, v in enumerate(cv):
                    x = list(v)
                    x[e] = ct.flip_weight(e, x)
                    if j < frozen and sum(x) > 2:
                        ok = False
                        break
                    if sum(x) > sums[j]:
                        ok = False
                        break
                    nv.append(tuple(x))
                if not ok:
                    continue
                nt = ct.flip(e)
                key = (nt.triangles, tuple(nv))
                if key not in seen:
                    seen.add(key)
                    nxt.append((nt, [list(x) for x in nv], path + (e,)))
        frontier = nxt
    return None


@dataclass
class Region:
    """One complementary piece at the cut system's standard position."""

    index: int
    cells: frozenset
    genus: int
    boundary_circles: int
    punctures: int
    adjacent_sides: tuple  # (component_index, side) pairs, side in {0, 1}

    @property
    def ends(self) -> int:
        return self.boundary_circles + self.punctures

    @property
    def complexity(self) -> int:
        return 3 * self.genus - 3 + self.ends

    @property
    def is_pants(self) -> bool:
        return self.genus == 0 and self.ends == 3

    def bounding_components(self):
        return sorted({i for i, _ in self.adjacent_sides})


class CutSystem:
    """A multicurve in standard position with its collars and regions."""

    def __init__(self, tri: Triangulation, boundary: Multicurve):
        boundary.check_analysis_ready()
        self.tri = tri
        self.boundary = boundary
        comps = [c.coords for c in boundary.component_curves()]
        self.components = comps
        self.flips = standardize_multicurve(tri, comps)
        st, moved = moves.transport(tri, self.flips, comps)
        self.short_tri = st
        self.short_comps = [tuple(v) for v in moved]
        self.collars = [ShortPosition(st, c) for c in self.short_comps]
        self._build_cells()
        self._build_regions()
        self._charts = {}
        self._catalogue = None

    # -- cell complex --------------------------------------------------------

    def _build_cells(self):
        st = self.short_tri
        self.arc_info = {}  # tri_index -> (comp_index, slot_a, slot_b, slot_c)
        for ci, sp in enumerate(self.collars):
            for t_index in (sp.t1, sp.t2):
                if t_index in self.arc_info:
                    raise PieceError("collars share a triangle")
                tpl = st.triangles[t_index]
                slots = {norm_label(lab): s for s, lab in enumerate(tpl)}
                sa, sb = slots[sp.f], slots[sp.g]
                sc = 3 - sa - sb
                self.arc_info[t_index] = (ci, sa, sb, sc)

    def _cell(self, t_index: int, corner: bool):
        if t_index not in self.arc_info:
            return (t_index, 0)
        return (t_index, 1 if corner else 2)

    def _cell_of_segment(self, label: int, seg: int):
        """Cell touching the tail/head segment (along +edge) of side `label`."""
        t_index, slot = self.short_tri.side[label]
        info = self.arc_info.get(t_index)
        if info is None:
            return (t_index, 0)
        ci, sa, sb, sc = info
        if slot == sc:
            return (t_index, 2)
        other = sb if slot == sa else sa
        corner_at_head = (other == (slot + 1) % 3)
        # head of the label is the +edge head iff the label is positive
        corner_seg = (HEAD if label >= 0 else TAIL) if corner_at_head else (
            TAIL if label >= 0 else HEAD
        )
        return (t_index, 1 if seg == corner_seg else 2)

    def _cell_at_corner(self, t_index: int, corner_slot: int):
        """Cell containing the triangle corner at tail(triangle[corner_slot])."""
        info = self.arc_info.get(t_index)
        if info is None:
            return (t_index, 0)
        ci, sa, sb, sc = info
        # the cut corner is the common vertex of sides sa, sb: that corner is
        # at tail(t[s]) for the slot s with previous slot being the other one
        if (sa + 1) % 3 == sb:
            cut_corner_slot = sb  # corner between sa and sb = tail of t[sb]
        elif (sb + 1) % 3 == sa:
            cut_corner_slot = sa
        else:
            raise PieceError("arc slots not adjacent")
        return (t_index, 1 if corner_slot == cut_corner_slot else 2)

    def _crossed(self, e: int) -> bool:
        return any(c[e] for c in self.short_comps)

    def _segments(self):
        st = self.short_tri
        for e in range(st.num_edges):
            lp, lm = e, ~e
            if not self._crossed(e):
                yield (self._cell_of_segment(lp, TAIL), self._cell_of_segment(lm, TAIL))
            else:
                for seg in (TAIL, HEAD):
                    yield (self._cell_of_segment(lp, seg), self._cell_of_segment(lm, seg))

    def _build_regions(self):
        st = self.short_tri
        cells = set()
        for t_index in range(st.num_triangles):
            if t_index in self.arc_info:
                cells.add((t_index, 1))
                cells.add((t_index, 2))
            else:
                cells.add((t_index, 0))
        parent = {c: c for c in cells}

        def find(c):
            while parent[c] != c:
                parent[c] = parent[parent[c]]
                c = parent[c]
            return c

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb

        segments = list(self._segments())
        for a, b in segments:
            union(a, b)

        roots = sorted({find(c) for c in cells})
        region_of_cell = {c: roots.index(find(c)) for c in cells}
        n_regions = len(roots)

        # side circles: per component, the two cell-sides of its arcs
        side_cells = []  # (comp, side) -> set of cells
        self.side_of = {}
        for ci, sp in enumerate(self.collars):
            sides = {}
            for t_index in (sp.t1, sp.t2):
                for corner in (True, False):
                    sides[(t_index, corner)] = None
            # group the four arc-sides into two circles via crossing segments:
            # at each crossing the two cells sharing a segment are on one side
            # of the curve; the corner cell of t1 pairs with whichever cell of
            # t2 it shares a TAIL/HEAD segment with across f or g.
            pair = {}
            for e in (sp.f, sp.g):
                for seg in (TAIL, HEAD):
                    c1 = self._cell_of_segment(e, seg)
                    c2 = self._cell_of_segment(~e, seg)
                    in1 = c1[0] in (sp.t1, sp.t2)
                    in2 = c2[0] in (sp.t1, sp.t2)
                    if in1 and in2:
                        pair.setdefault(c1, set()).add(c2)
                        pair.setdefault(c2, set()).add(c1)
            corner1 = (sp.t1, 1)
            mates = pair.get(corner1, set())
            mates = {c for c in mates if c[0] == sp.t2}
            if len(mates) != 1:
                raise PieceError("collar side pairing failed")
            mate = next(iter(mates))
            other_t2 = (sp.t2, 1 if mate == (sp.t2, 2) else 2)
            circle0 = (corner1, mate)
            circle1 = ((sp.t1, 2), other_t2)
            for side, circ in ((0, circle0), (1, circle1)):
                r0 = region_of_cell[circ[0]]
                if region_of_cell[circ[1]] != r0:
                    raise PieceError("collar side spans two regions")
                side_cells.append(((ci, side), circ, r0))
                self.side_of[(ci, side)] = r0

        # Euler data per region
        st_ = st
        F = [0] * n_regions
        for c in cells:
            F[region_of_cell[c]] += 1
        E = [0] * n_regions
        for a, b in segments:
            E[region_of_cell[a]] += 1
        circles_of_region = [[] for _ in range(n_regions)]
        for (ci_side, circ, r0) in side_cells:
            circles_of_region[r0].append(ci_side)
            E[r0] += 2  # the two arc-sides forming this circle
        V = [0] * n_regions
        punctures = [0] * n_regions
        for v in range(st_.num_vertices):
            lab = st_.vertices[v][0]
            t_index, slot = st_.side[lab]
            cell = self._cell_at_corner(t_index, slot)
            r0 = region_of_cell[cell]
            V[r0] += 1
            punctures[r0] += 1
        for r0, circs in enumerate(circles_of_region):
            V[r0] += 2 * len(circs)  # two crossing points per side circle

        self.regions = []
        for r0 in range(n_regions):
            chi = V[r0] - E[r0] + F[r0]
            n_bd = len(circles_of_region[r0])
            genus2 = 2 - chi - n_bd
            if genus2 % 2:
                raise PieceError("non-integral genus in region classification")
            self.regions.append(
                Region(
                    index=r0,
                    cells=frozenset(c for c in cells if region_of_cell[c] == r0),
                    genus=genus2 // 2,
                    boundary_circles=n_bd,
                    punctures=punctures[r0],
                    adjacent_sides=tuple(sorted(circles_of_region[r0])),
                )
            )
        self.region_of_cell = region_of_cell

    # -- locating curves -------------------------------------------------------

    def to_short(self, coords):
        """Transport canonical-chart coordinates to the standard position."""
        _, (v,) = moves.transport(self.tri, self.flips, [coords])
        return v

    def from_short(self, coords):
        v = [list(coords)]
        moves._apply_flips_inverse(self.short_tri, v, self.flips)
        return tuple(v[0])

    def locate(self, coords_short) -> int:
        """Region index containing a curve disjoint from the boundary.

        The curve is overlaid with the boundary (their union is a multicurve)
        and one of its strands is classified into a cell.
        """
        for ci, comp in enumerate(self.short_comps):
            if tuple(coords_short) == comp:
                raise PieceError("curve is isotopic to a boundary component")
        union = [a + sum(c[e] for c in self.short_comps) for e, a in enumerate(coords_short)]
        b_total = [sum(c[e] for c in self.short_comps) for e in range(len(union))]
        # b-strand ranks within the union, per directed label
        b_ranks = {}
        comp_keys = set(self.short_comps)
        st = self.short_tri
        for e in range(st.num_edges):
            if b_total[e] == 0:
                continue
            for rank in range(union[e]):
                from .strands import trace_component

                counts, visited = trace_component(st, union, e, rank)
                if tuple(counts) in comp_keys:
                    for lab, r in visited:
                        b_ranks.setdefault(lab, set()).add(r)
        # find a strand of the curve itself and classify one crossing
        for e in range(st.num_edges):
            if coords_short[e] == 0:
                continue
            for rank in range(union[e]):
                if rank in b_ranks.get(e, ()):
                    continue
                # crossing of the curve on edge e at union-rank `rank`
                return self._region_of_crossing(e, rank, union, b_ranks)
        raise PieceError("could not locate the curve among the regions")

    def _region_of_crossing(self, e, rank, union, b_ranks):
        st = self.short_tri
        if not self._crossed(e):
            t_index, _ = st.side[e]
            cell = (
                self._cell(t_index, False)
                if t_index not in self.arc_info
                else self._cell_of_segment(e, TAIL)
            )
            if t_index not in self.arc_info:
                return self.region_of_cell[(t_index, 0)]
            return self.region_of_cell[cell]
        b_rank = next(iter(b_ranks[e]))
        seg = TAIL if rank < b_rank else HEAD
        cell = self._cell_of_segment(e, seg)
        return self.region_of_cell[cell]

    # -- charts -----------------------------------------------------------------

    def catalogue(self, max_length=10):
        if self._catalogue is None:
            self._catalogue = enumerate_curves(self.short_tri, max_length=max_length)
        return self._catalogue

    def region_curves(self, index: int, max_length=10):
        """Catalogue curves living in region `index` (disjoint from boundary)."""
        out = []
        b_vec = self.boundary_short_vector()
        from .curves import intersection_number

        for cand in self.catalogue(max_length):
            if any(cand.coords == c for c in self.short_comps):
                continue
            if intersection_number(self.short_tri, cand.coords, b_vec) != 0:
                continue
            try:
                if self.locate(cand.coords) == index:
                    out.append(cand)
            except PieceError:
                continue
            if len(out) >= 24:
                break
        return out

    def boundary_short_vector(self):
        return [sum(c[e] for c in self.short_comps) for e in range(self.short_tri.num_edges)]

    def chart(self, index: int) -> FareyChart:
        """Exact slope chart for a complexity-one region."""
        if index in self._charts:
            return self._charts[index]
        region = self.regions[index]
        if region.complexity != 1:
            raise PieceError("chart only exists on complexity-one regions")

        def shortenable(c):
            from .curves import short_data

            try:
                short_data(self.short_tri, c.coords)
                return True
            except MoveError:
                return False

        curves = [c for c in self.region_curves(index) if shortenable(c)]
        want_delta = 1 if region.genus == 1 else 2
        chart = None
        for i, u_inf in enumerate(curves):
            for u_zero in curves[i + 1:]:
                if u_inf.intersection(u_zero) != want_delta:
                    continue
                aux = self._find_aux(u_inf, u_zero, want_delta, shortenable)
                if aux is not None:
                    chart = FareyChart.from_refs(u_inf, u_zero, aux)
                    break
            if chart:
                break
        if chart is None:
            raise PieceError("no chart references found in region")
        self._charts[index] = chart
        return chart

    def _find_aux(self, u_inf, u_zero, delta, shortenable):
        """A third reference of positive slope, built by twisting the refs.

        Images of the refs under short twist words realize slopes like 1/2
        and 2/1; the first one that is shortenable (some slope classes of a
        sphere-like piece admit no two-point position) is taken.
        """
        from .curves import MappingClassWord, TwistLetter, AffineExpr, apply_word

        for s in (1, -1):
            for t in (1, -1):
                for first, second in ((u_inf, u_zero), (u_zero, u_inf)):
                    word = MappingClassWord(
                        (
                            TwistLetter(first.coords, AffineExpr(0, t)),
                            TwistLetter(second.coords, AffineExpr(0, s)),
                        )
                    )
                    cand = apply_word(word, 0, first)
                    qa = cand.intersection(u_inf)
                    pa = cand.intersection(u_zero)
                    if qa % delta or pa % delta:
                        continue
                    if pa // delta >= 1 and qa // delta >= 1 and shortenable(cand):
                        return cand
        return None


_cut_cache: dict = {}


def cut_system(tri: Triangulation, boundary: Multicurve) -> CutSystem:
    key = (tri.triangles, boundary.coords)
    cs = _cut_cache.get(key)
    if cs is None:
        cs = CutSystem(tri, boundary)
        if len(_cut_cache) > 512:
            _cut_cache.clear()
        _cut_cache[key] = cs
    return cs
