"""Carrying curves to short position and Dehn twisting.

A single curve is *short* when it crosses the triangulation in exactly two
points.  Every twist is executed there: one flip of a crossed edge turns the
collar's diagonal once around the core, and a relabeling identifies the
flipped triangulation with the original.  Conjugating by the shortening flip
sequence transports the move to the original chart.
"""

from __future__ import annotations

from .kernel import Triangulation, norm_label
from .strands import ShortPosition, StrandError


class MoveError(Exception):
    pass


PLATEAU_LIMIT = 20_000


def _flip_gain(tri, w, e):
    return tri.flip_weight(e, w) - w[e]


def _apply_flips(tri, vectors, flips):
    """Apply a flip sequence to several weight vectors; returns final tri."""
    for e in flips:
        for v in vectors:
            v[e] = tri.flip_weight(e, v)
        tri = tri.flip(e)
    return tri


def _apply_flips_inverse(tri, vectors, flips):
    for e in reversed(flips):
        for v in vectors:
            v[e] = tri.flip_weight(e, v)
        tri = tri.flip_inverse(e)
    return tri


def shortening_flips(tri: Triangulation, curve):
    """Flip sequence carrying the single curve `curve` to a short position.

    Greedy weight descent, with a breadth-first search through
    weight-preserving flips to escape plateaus.  Raises MoveError if the
    curve admits no two-point position reachable this way (for instance a
    separating curve cutting off a puncture-free piece).
    """
    w = list(curve)
    flips = []
    t = tri
    while sum(w) > 2:
        best = None
        for e in range(t.num_edges):
            if w[e] == 0 or not t.is_flippable(e):
                continue
            gain = _flip_gain(t, w, e)
            if gain < 0 and (best is None or gain < best[0]):
                best = (gain, e)
        if best is not None:
            e = best[1]
            w[e] = t.flip_weight(e, w)
            t = t.flip(e)
            flips.append(e)
            continue
        # plateau: BFS over weight-preserving flips until a descent appears
        start = (t, tuple(w))
        frontier = [(t, tuple(w), ())]
        seen = {(t.triangles, tuple(w))}
        found = None
        while frontier and found is None:
            if len(seen) > PLATEAU_LIMIT:
                raise MoveError("curve shortening stalled on a large plateau")
            nxt = []
            for ct, cw, path in frontier:
                for e in range(ct.num_edges):
                    if not ct.is_flippable(e):
                        continue
                    gain = _flip_gain(ct, cw, e)
                    if gain < 0:
                        found = (path + (e,),)
                        break
                    if gain == 0:
                        nw = list(cw)
                        nw[e] = ct.flip_weight(e, cw)
                        nt = ct.flip(e)
                        key = (nt.triangles, tuple(nw))
                        if key not in seen:
                            seen.add(key)
                            nxt.append((nt, tuple(nw), path + (e,)))
                if found:
                    break
            frontier = nxt
        if found is None:
            raise MoveError(
                "curve admits no reachable two-point position on this surface"
            )
        for e in found[0]:
            w[e] = t.flip_weight(e, w)
            t = t.flip(e)
            flips.append(e)
    return flips


def _find_relabel(t_new: Triangulation, t_old: Triangulation, f: int, g: int):
    """Signed-label isomorphism t_new -> t_old fixing every edge except f, g
    (which swap), acting trivially on vertices.  Returns the map or None."""
    e_count = t_old.num_edges
    unsigned = {e: e for e in range(e_count)}
    unsigned[f], unsigned[g] = g, f

    old_triples = {}
    for tpl in t_old.triangles:
        for k in range(3):
            rot = (tpl[k], tpl[(k + 1) % 3], tpl[(k + 2) % 3])
            old_triples[rot] = True

    solutions = []

    def extend(assign, idx):
        if idx == len(t_new.triangles):
            solutions.append(dict(assign))
            return
        tpl = t_new.triangles[idx]
        # try both sign choices for the first unassigned label, then verify
        opts = []
        for signs in range(8):
            image = []
            ok = True
            for j, lab in enumerate(tpl):
                e = norm_label(lab)
                target = unsigned[e]
                flip_sign = bool(signs >> j & 1)
                pos = lab >= 0
                img = target if (pos ^ flip_sign) else ~target
                if lab in assign and assign[lab] != img:
                    ok = False
                    break
                image.append(img)
            if not ok:
                continue
            if tuple(image) not in old_triples:
                # also try rotations handled by old_triples; already rotated
                continue
            opts.append(image)
        for image in opts:
            new_assign = dict(assign)
            consistent = True
            for lab, img in zip(tpl, image):
                for a, b in ((lab, img), (~lab, ~img)):
                    if a in new_assign and new_assign[a] != b:
                        consistent = False
                if not consistent:
                    break
                new_assign[lab] = img
                new_assign[~lab] = ~img
            if consistent:
                extend(new_assign, idx + 1)

    extend({}, 0)

    results = []
    for sol in solutions:
        # must fix every vertex (the twist is supported in the collar)
        ok = True
        for lab, img in sol.items():
            if t_new.vertex_of_label[lab] != t_old.vertex_of_label[img]:
                ok = False
                break
        if ok:
            results.append(sol)
    if not results:
        return None
    perms = {
        tuple(norm_label(sol[e]) for e in range(e_count)) for sol in results
    }
    if len(perms) != 1:
        raise MoveError("ambiguous collar relabeling")
    return results[0]


class TwistMove:
    """The right Dehn twist about a fixed single curve, as a coordinate map.

    Built once per (triangulation, curve), then applied to any number of
    coordinate vectors with any integer exponent.
    """

    __slots__ = (
        "tri",
        "curve",
        "flips",
        "short_tri",
        "short_curve",
        "position",
        "flip_edge",
        "perm",
    )

    def __init__(self, tri: Triangulation, curve):
        self.tri = tri
        self.curve = tuple(curve)
        self.flips = shortening_flips(tri, curve)
        cw = [list(curve)]
        self.short_tri = _apply_flips(tri, cw, self.flips)
        self.short_curve = tuple(cw[0])
        self.position = ShortPosition(self.short_tri, self.short_curve)

        f, g = self.position.f, self.position.g
        choice = None
        for cand, other in ((f, g), (g, f)):
            if not self.short_tri.is_flippable(cand):
                continue
            a, b, c, d = self.short_tri.square(cand)
            if norm_label(a) == other and norm_label(c) == other:
                choice = (cand, other)
                break
        if choice is None:
            raise MoveError("no right-handed flip available at short position")
        cand, other = choice
        t_new = self.short_tri.flip(cand)
        relabel = _find_relabel(t_new, self.short_tri, cand, other)
        if relabel is None:
            raise MoveError("collar relabeling not found")
        self.flip_edge = cand
        self.perm = tuple(
            norm_label(relabel[e]) for e in range(self.short_tri.num_edges)
        )
        # the move must fix the core
        w = list(self.short_curve)
        self._short_apply(w, 1)
        if tuple(w) != self.short_curve:
            raise MoveError("twist does not fix its own core")

    def _short_apply(self, w, k: int) -> None:
        """Apply the twist k times to a vector on the short triangulation."""
        e = self.flip_edge
        perm = self.perm
        if k >= 0:
            for _ in range(k):
                w[e] = self.short_tri.flip_weight(e, w)
                old = list(w)
                for src in range(len(perm)):
                    w[perm[src]] = old[src]
        else:
            t_new = self.short_tri.flip(e)
            for _ in range(-k):
                old = list(w)
                for src in range(len(perm)):
                    w[src] = old[perm[src]]
                w[e] = t_new.flip_weight(e, w)

    def apply(self, vector, k: int):
        """Return the coordinates of D^k(vector) on the original chart."""
        if k == 0:
            return list(vector)
        v = [list(vector)]
        _apply_flips(self.tri, v, self.flips)
        self._short_apply(v[0], k)
        _apply_flips_inverse(self.short_tri, v, self.flips)
        return v[0]


_twist_cache: dict = {}


def twist_move(tri: Triangulation, curve) -> TwistMove:
    key = (tri.triangles, tuple(curve))
    move = _twist_cache.get(key)
    if move is None:
        move = TwistMove(tri, curve)
        if len(_twist_cache) > 4096:
            _twist_cache.clear()
        _twist_cache[key] = move
    return move


def short_position(tri: Triangulation, curve):
    """Shorten `curve`, carrying along nothing; returns (flips, tri, coords)."""
    flips = shortening_flips(tri, curve)
    cw = [list(curve)]
    st = _apply_flips(tri, cw, flips)
    return flips, st, tuple(cw[0])


def transport(tri: Triangulation, flips, vectors):
    """Apply a recorded flip sequence to fresh copies of `vectors`.

    Returns (short_tri, transported lists).
    """
    vs = [list(v) for v in vectors]
    st = _apply_flips(tri, vs, flips)
    return st, vs
