"""Exact overlay of several curves and the binding test.

The curves are traced strand by strand; their taut interleaving along every
edge is fixed by walking pairs of strands to their first divergence (band
transitions preserve relative order, so the first divergence decides).  With
the orders pinned, each triangle becomes a straight-line chord arrangement
over exact rationals; complementary regions of the union are faces glued
across edge gaps, and their topology comes from an Euler count with corner
orbits.  A collection binds the surface exactly when every region is a disk
containing at most one puncture.

Small-scale machinery: cost grows with the total weight of the system.
"""

from __future__ import annotations

import functools
from fractions import Fraction

from .kernel import Triangulation, norm_label
from .strands import next_state, step


class ArrangementError(Exception):
    pass


WEIGHT_LIMIT = 3000


def _band_of(tri, coords, label, rank):
    """0 when the point's arc cuts the tail corner of `label`, else 1."""
    _, m, n = tri.triangle_of(label)
    wl = coords[norm_label(label)]
    wn, wm = coords[norm_label(n)], coords[norm_label(m)]
    local = rank if label >= 0 else wl - 1 - rank
    c_ln = (wl + wn - wm) // 2
    return 0 if local < c_ln else 1


def _forward(tri, coords, state):
    out, out_rank = step(tri, coords, *state)
    return next_state(out, out_rank)


def _backward(tri, coords, state):
    """Previous entering state of the strand through `state`."""
    label, rank = state
    return step(tri, coords, ~label, rank)


def _compare_points(tri, curves, a, b, budget=100_000):
    """Taut order along the positive edge direction of two strand points.

    a, b: (curve_index, edge, rank) on the same edge.  Parallel strands
    tie-break consistently by (curve index, rank).
    """
    (ia, e, ra), (ib, _, rb) = a, b
    ca, cb = curves[ia], curves[ib]
    pa, pb = (e, ra), (e, rb)
    for _ in range(budget):
        band_a = _band_of(tri, ca, *pa)
        band_b = _band_of(tri, cb, *pb)
        if band_a != band_b:
            return -1 if band_a < band_b else 1
        pa = _forward(tri, ca, pa)
        pb = _forward(tri, cb, pb)
        if pa == (e, ra) and pb == (e, rb):
            break
    else:
        raise ArrangementError("comparator exceeded budget (forward)")
    pa, pb = (e, ra), (e, rb)
    for _ in range(budget):
        # arrival band into the current point, measured along the partner side
        band_a = _band_of(tri, ca, ~pa[0], pa[1])
        band_b = _band_of(tri, cb, ~pb[0], pb[1])
        if band_a != band_b:
            # locals along ~label run opposite to labels, so the order flips
            return 1 if band_a < band_b else -1
        pa = _backward(tri, ca, pa)
        pb = _backward(tri, cb, pb)
        if pa == (e, ra) and pb == (e, rb):
            break
    else:
        raise ArrangementError("comparator exceeded budget (backward)")
    return -1 if (ia, ra) < (ib, rb) else 1


def _angular_key(vec):
    """Exact ccw angular sort key for nonzero rational vectors."""
    x, y = vec
    if y > 0 or (y == 0 and x > 0):
        half = 0
    else:
        half = 1
    return half, (-x / y if y != 0 else Fraction(-10 ** 9))


def _angular_compare(u, v):
    """Exact ccw comparison of direction vectors starting from +x axis."""
    def half(w):
        x, y = w
        return 0 if (y > 0 or (y == 0 and x > 0)) else 1

    hu, hv = half(u), half(v)
    if hu != hv:
        return -1 if hu < hv else 1
    cross = u[0] * v[1] - u[1] * v[0]
    if cross == 0:
        return 0
    return -1 if cross > 0 else 1


def region_data(tri: Triangulation, curves):
    """Regions of the complement of the union: list of (chi, punctures).

    chi is computed on the region compactified with punctures filled and
    boundary circles kept, so a disk region reports chi == 1.
    """
    curves = [tuple(c) for c in curves]
    total = sum(sum(c) for c in curves)
    if total > WEIGHT_LIMIT:
        raise ArrangementError("system too heavy for the overlay machinery")

    # taut order of all points per directed label
    orders = {}
    for e in range(tri.num_edges):
        pts = [
            (i, e, rank)
            for i, c in enumerate(curves)
            for rank in range(c[e])
        ]
        pts.sort(
            key=functools.cmp_to_key(
                lambda x, y: _compare_points(tri, curves, x, y)
            )
        )
        orders[e] = pts
        orders[~e] = list(reversed(pts))

    corners_pos = [
        (Fraction(0), Fraction(0)),
        (Fraction(1), Fraction(0)),
        (Fraction(0), Fraction(1)),
    ]

    nodes = {}  # node key -> position (per triangle)
    darts = []  # [node_a, node_b, kind]; kind "curve" or ("gap", label)

    def add_node(t_index, key, pos):
        k = (t_index,) + key
        nodes[k] = pos
        return k

    def side_point(slot, j, m):
        (x0, y0) = corners_pos[slot]
        (x1, y1) = corners_pos[(slot + 1) % 3]
        t = Fraction(j + 1, m + 1)
        return (x0 + (x1 - x0) * t, y0 + (y1 - y0) * t)

    def seg_inter(p1, p2, p3, p4):
        d1 = (p2[0] - p1[0], p2[1] - p1[1])
        d2 = (p4[0] - p3[0], p4[1] - p3[1])
        den = d1[0] * d2[1] - d1[1] * d2[0]
        if den == 0:
            return None
        t = ((p3[0] - p1[0]) * d2[1] - (p3[1] - p1[1]) * d2[0]) / den
        u = ((p3[0] - p1[0]) * d1[1] - (p3[1] - p1[1]) * d1[0]) / den
        if 0 < t < 1 and 0 < u < 1:
            return (p1[0] + t * d1[0], p1[1] + t * d1[1])
        return None

    for t_index, tpl in enumerate(tri.triangles):
        # side points are keyed by their *directed* label: a triangle can
        # carry both sides of one edge, and those are distinct points
        pos_on_side = {}
        for slot, lab in enumerate(tpl):
            pts = orders[lab]
            for j, (i, _, rank) in enumerate(pts):
                pos_on_side[(i, lab, rank)] = side_point(slot, j, len(pts))
        # arcs of the triangle, found once per endpoint pair
        arcs = {}
        for slot, lab in enumerate(tpl):
            for (i, _, rank) in orders[lab]:
                out, out_rank = step(tri, curves[i], lab, rank)
                p = (i, lab, rank)
                q = (i, out, out_rank)
                arcs[frozenset((p, q))] = (p, q, i)
        arcs = list(arcs.values())
        # split chords at pairwise crossings
        for idx, (p, q, i) in enumerate(arcs):
            p1, p2 = pos_on_side[p], pos_on_side[q]
            cuts = []
            for jdx, (r, s2, i2) in enumerate(arcs):
                if jdx == idx:
                    continue
                x = seg_inter(p1, p2, pos_on_side[r], pos_on_side[s2])
                if x is not None:
                    cuts.append(x)

            def param(pt):
                dx, dy = p2[0] - p1[0], p2[1] - p1[1]
                return (pt[0] - p1[0]) / dx if dx else (pt[1] - p1[1]) / dy

            chain = [p1] + sorted(set(cuts), key=param) + [p2]
            prev = add_node(t_index, ("side",) + p, p1)
            for pos in chain[1:]:
                if pos == p2:
                    nk = add_node(t_index, ("side",) + q, p2)
                else:
                    nk = add_node(t_index, ("x", pos), pos)
                darts.append([prev, nk, "curve"])
                prev = nk
        # subdivided triangle boundary: the gaps
        for slot, lab in enumerate(tpl):
            walk = [add_node(t_index, ("corner", slot), corners_pos[slot])]
            for (i, _, rank) in orders[lab]:
                key = (i, lab, rank)
                walk.append(add_node(t_index, ("side",) + key, pos_on_side[key]))
            walk.append(
                add_node(
                    t_index, ("corner", (slot + 1) % 3), corners_pos[(slot + 1) % 3]
                )
            )
            for a, b in zip(walk, walk[1:]):
                darts.append([a, b, ("gap", lab)])

    # angular rotation at each node, exact
    incident = {}
    for di, (a, b, kind) in enumerate(darts):
        incident.setdefault(a, []).append((di, 0))
        incident.setdefault(b, []).append((di, 1))
    rotations = {}
    for v, ends in incident.items():
        pv = nodes[v]

        def direction(end):
            di, side = end
            other = darts[di][1 - side]
            po = nodes[other]
            return (po[0] - pv[0], po[1] - pv[1])

        rotations[v] = sorted(
            ends,
            key=functools.cmp_to_key(
                lambda x, y: _angular_compare(direction(x), direction(y))
            ),
        )
        rot_index = {end: k for k, end in enumerate(rotations[v])}
        rotations[v] = (rotations[v], rot_index)

    def walk_face(start):
        out = []
        cur = start  # (dart index, direction 0: a->b / 1: b->a)
        guard = 0
        while True:
            di, dirn = cur
            a, b, kind = darts[di]
            vto = b if dirn == 0 else a
            out.append(cur)
            ends, rot_index = rotations[vto]
            arrive = (di, 1 - dirn)
            k = rot_index[arrive]
            ndi, nside = ends[(k + 1) % len(ends)]
            cur = (ndi, 0 if nside == 0 else 1)
            guard += 1
            if guard > 4 * len(darts) + 8:
                raise ArrangementError("face walk does not close")
            if cur == start:
                return out

    used = set()
    faces = []
    for di in range(len(darts)):
        for dirn in (0, 1):
            if (di, dirn) not in used:
                w = walk_face((di, dirn))
                used.update(w)
                faces.append(w)

    def area(w):
        s = Fraction(0)
        for (di, dirn) in w:
            a, b, _ = darts[di]
            pa = nodes[a if dirn == 0 else b]
            pb = nodes[b if dirn == 0 else a]
            s += pa[0] * pb[1] - pb[0] * pa[1]
        return s / 2

    def tri_of_face(w):
        return darts[w[0][0]][0][0]

    by_triangle = {}
    for fi, w in enumerate(faces):
        by_triangle.setdefault(tri_of_face(w), []).append(fi)
    inner = set()
    half = Fraction(1, 2)
    for t_index, fis in by_triangle.items():
        areas = [(area(faces[fi]), fi) for fi in fis]
        # the rotation rule traces inner faces clockwise (negative area) and
        # the outer walk counterclockwise around the whole triangle
        outer_area, outer = max(areas)
        if outer_area != half or sum(a for a, _ in areas) != 0:
            raise ArrangementError("face orientation invariant failed")
        inner.update(fi for _, fi in areas if fi != outer)

    faces = {fi: faces[fi] for fi in inner}

    # incidences of inner faces on darts
    incid_gap = {}
    incid_curve = {}
    for fi, w in faces.items():
        for pos, (di, dirn) in enumerate(w):
            kind = darts[di][2]
            if kind == "curve":
                incid_curve.setdefault(di, []).append((fi, pos, dirn))
            else:
                occ = incid_gap.setdefault(di, [])
                occ.append((fi, pos, dirn))
    for di, occ in incid_gap.items():
        if len(occ) != 1:
            raise ArrangementError("gap dart should bound one inner face")

    # pair gap darts across edges: the k-th segment along label e is the
    # (m - k)-th along ~e, traversed the other way
    gap_chain = {}
    for di, (a, b, kind) in enumerate(darts):
        if kind != "curve":
            gap_chain.setdefault(kind[1], []).append(di)
    gap_pairs = []
    for e in range(tri.num_edges):
        ca = gap_chain.get(e, [])
        cb = gap_chain.get(~e, [])
        if len(ca) != len(cb):
            raise ArrangementError("gap chains mismatch across an edge")
        for k, di in enumerate(ca):
            gap_pairs.append((di, cb[len(cb) - 1 - k]))

    parent = {fi: fi for fi in faces}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    # corner orbits for the Euler count: corner (fi, pos) sits at the node
    # the walk arrives at after its pos-th dart; gluing a segment identifies
    # the corners at its two endpoints across the edge
    cparent = {}

    def cfind(x):
        while cparent[x] != x:
            cparent[x] = cparent[cparent[x]]
            x = cparent[x]
        return x

    def cunion(x, y):
        rx, ry = cfind(x), cfind(y)
        if rx != ry:
            cparent[rx] = ry

    for fi, w in faces.items():
        for pos in range(len(w)):
            cparent[(fi, pos)] = (fi, pos)

    for di, dj in gap_pairs:
        (f1, p1, dirn1) = incid_gap[di][0]
        (f2, p2, dirn2) = incid_gap[dj][0]
        union(f1, f2)
        w1, w2 = faces[f1], faces[f2]
        # physical matching: di runs a1->b1 along its label, dj runs a2->b2
        # along the partner label; a1 = b2 and b1 = a2 as points of the edge.
        # corner of f at a node: (f, pos) if the walk arrives there via this
        # dart, else (f, pos - 1).
        c1_at_b1 = (f1, p1) if dirn1 == 0 else (f1, (p1 - 1) % len(w1))
        c1_at_a1 = (f1, (p1 - 1) % len(w1)) if dirn1 == 0 else (f1, p1)
        c2_at_b2 = (f2, p2) if dirn2 == 0 else (f2, (p2 - 1) % len(w2))
        c2_at_a2 = (f2, (p2 - 1) % len(w2)) if dirn2 == 0 else (f2, p2)
        cunion(c1_at_b1, c2_at_a2)  # b1 = a2
        cunion(c1_at_a1, c2_at_b2)  # a1 = b2

    # assemble per-region data
    node_after = {}
    for fi, w in faces.items():
        for pos, (di, dirn) in enumerate(w):
            a, b, _ = darts[di]
            node_after[(fi, pos)] = b if dirn == 0 else a

    regions = {}
    for fi in faces:
        regions.setdefault(find(fi), []).append(fi)
    out = []
    for root, fis in regions.items():
        fset = set(fis)
        n_gap = sum(
            1 for di, dj in gap_pairs if incid_gap[di][0][0] in fset
        )
        n_curve = sum(
            sum(1 for (fi, _, _) in occ if fi in fset)
            for di, occ in incid_curve.items()
        )
        corner_orbits = {
            cfind((fi, pos)) for fi in fis for pos in range(len(faces[fi]))
        }
        V = len(corner_orbits)
        E = n_gap + n_curve
        F = len(fis)
        chi = V - E + F
        punctures = {
            tri.vertex_of_label[tri.triangles[nk[0]][nk[2]]]
            for fi in fis
            for pos in range(len(faces[fi]))
            for nk in (node_after[(fi, pos)],)
            if nk[1] == "corner"
        }
        out.append((chi, len(punctures)))
    return out


def is_binding(tri: Triangulation, curves) -> bool:
    """True iff the union cuts the surface into disks or once-punctured disks."""
    coords_list = [tuple(c) for c in curves if any(c)]
    if not coords_list:
        return False
    return all(
        chi == 1 and punct <= 1 for chi, punct in region_data(tri, coords_list)
    )