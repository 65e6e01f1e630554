"""Slope charts and exact distances on complexity-one curve complexes.

The curve complex of a once-punctured torus or four-punctured sphere world
is the Farey graph: vertices are slopes p/q, edges where |ps - qr| equals 1.
Intersection numbers there are delta*|ps - qr| with delta = 1 (torus-like)
or 2 (sphere-like).  A chart is pinned by three pairwise-minimally-crossing
reference curves playing the roles of 1/0, 0/1 and a mediant.

Exact distance uses the convergent strip of the relative slope: geodesics
hop between continued-fraction pivots, crossing each fan either along its
rim or through its hub.  The small-slope BFS oracle in the tests certifies
this independently.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from math import gcd

from .curves import CurveError, Multicurve, MappingClassWord, TwistLetter, AffineExpr, apply_word


class FareyError(Exception):
    pass


def _ext_gcd(a, b):
    if b == 0:
        return (1, 0) if a >= 0 else (-1, 0)
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return x0, y0


def _continued_fraction(p: int, q: int):
    """Floor continued fraction of p/q, q > 0."""
    terms = []
    while q:
        a = p // q
        terms.append(a)
        p, q = q, p - a * q
    return terms


def farey_distance(a, b) -> int:
    """Exact Farey-graph distance between slopes a = (p, q), b = (r, s)."""
    p, q = a
    r, s = b
    if q < 0:
        p, q = -p, -q
    if s < 0:
        r, s = -r, -s
    if gcd(p, q) != 1 or gcd(r, s) != 1:
        raise FareyError("slopes must be coprime pairs")
    if (p, q) == (r, s):
        return 0
    det = p * s - q * r
    if abs(det) == 1:
        return 1
    # move b to infinity with M = [[u, v], [-s, r]] where u*r + v*s = 1
    u, v = _ext_gcd(r, s)
    pp = u * p + v * q
    qq = -s * p + r * q
    if qq < 0:
        pp, qq = -pp, -qq
    if qq == 0:
        return 0  # cannot happen: equality handled above
    terms = _continued_fraction(pp, qq)
    # convergents c_{-1} = 1/0, c_0, ..., c_M = pp/qq
    hs = [0, 1]
    ks = [1, 0]
    for t in terms:
        hs.append(t * hs[-1] + hs[-2])
        ks.append(t * ks[-1] + ks[-2])
    m = len(terms)  # nodes 0..m where node i is convergent c_{i-1}
    # Dijkstra over the pivot strip: hub hops cost 1, rim crossings cost a_k
    dist = [None] * (m + 1)
    dist[0] = 0
    heap = [(0, 0)]
    while heap:
        d, i = heapq.heappop(heap)
        if dist[i] is not None and d > dist[i]:
            continue
        if i == m:
            return d
        for j, cost in ((i + 1, 1), (i + 2, abs(terms[i + 1]) if i + 1 < len(terms) else None)):
            if j > m or cost is None:
                continue
            nd = d + cost
            if dist[j] is None or nd < dist[j]:
                dist[j] = nd
                heapq.heappush(heap, (nd, j))
    raise FareyError("unreachable")


def farey_neighbors(slope, bound):
    """All Farey neighbors of `slope` with |p|, |q| <= bound (test oracle)."""
    p, q = slope
    out = set()
    u, v = _ext_gcd(p, q)  # p*u + q*v = 1
    # solutions of p*s - q*r = +-1: (r, s) = +-(-v, u) + t*(p, q)
    for r0, s0 in ((-v, u), (v, -u)):
        ts = []
        for base, step in ((r0, p), (s0, q)):
            if step:
                ts.append(((-bound - base) // step, (bound - base) // step))
        lo = min(min(a, b) for a, b in ts) - 1
        hi = max(max(a, b) for a, b in ts) + 1
        for t in range(lo, hi + 1):
            r, s = r0 + t * p, s0 + t * q
            if abs(r) > bound or abs(s) > bound:
                continue
            if s < 0 or (s == 0 and r < 0):
                r, s = -r, -s
            out.add((r, s))
    return out


def farey_distance_bfs(a, b, bound) -> int:
    """Breadth-first distance within the ball of slopes bounded by `bound`."""
    def norm(v):
        p, q = v
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        return (p, q)

    a, b = norm(a), norm(b)
    if a == b:
        return 0
    frontier = {a}
    seen = {a}
    d = 0
    while frontier:
        d += 1
        nxt = set()
        for v in frontier:
            for u in farey_neighbors(v, bound):
                if u == b:
                    return d
                if u not in seen:
                    seen.add(u)
                    nxt.add(u)
        frontier = nxt
    raise FareyError("BFS ball exhausted without reaching target")


# -- charts -------------------------------------------------------------------


@dataclass
class FareyChart:
    """Slope coordinates on a complexity-one world inside the ambient surface.

    u_inf and u_zero cross exactly delta times and carry slopes 1/0, 0/1;
    u_aux is any third curve crossing both, declared to have positive slope
    p_aux/q_aux.  That declaration orients the chart and disambiguates the
    sign of every other slope.  delta = 1 on torus-like worlds, 2 on
    sphere-like ones.
    """

    u_inf: Multicurve
    u_zero: Multicurve
    u_aux: Multicurve
    delta: int
    p_aux: int
    q_aux: int

    @classmethod
    def from_refs(cls, u_inf, u_zero, u_aux):
        delta = u_inf.intersection(u_zero)
        if delta not in (1, 2):
            raise FareyError(f"reference curves cross {delta} times, want 1 or 2")
        qa = u_aux.intersection(u_inf)
        pa = u_aux.intersection(u_zero)
        if qa % delta or pa % delta:
            raise FareyError("auxiliary reference crossing numbers off parity")
        p_aux, q_aux = pa // delta, qa // delta
        if p_aux < 1 or q_aux < 1 or gcd(p_aux, q_aux) != 1:
            raise FareyError(
                f"auxiliary reference must have slope p/q with p, q >= 1, "
                f"got ({p_aux}, {q_aux})"
            )
        return cls(u_inf, u_zero, u_aux, delta, p_aux, q_aux)

    def slope(self, x: Multicurve):
        """Slope (p, q) of a curve carried by this world."""
        qd = x.intersection(self.u_inf)
        pd = x.intersection(self.u_zero)
        sd = x.intersection(self.u_aux)
        if qd % self.delta or pd % self.delta or sd % self.delta:
            raise FareyError("curve does not live on this chart")
        q, p, s1 = qd // self.delta, pd // self.delta, sd // self.delta
        if q == 0:
            if p != 1:
                raise FareyError("curve disjoint from u_inf but not isotopic to it")
            return (1, 0)
        if p == 0:
            if q != 1:
                raise FareyError("inconsistent slope data")
            return (0, 1)
        cands = [
            c for c in (p, -p) if abs(self.p_aux * q - self.q_aux * c) == s1
        ]
        if len(cands) != 1 or gcd(abs(cands[0]), q) != 1:
            raise FareyError(f"inconsistent slope data ({p}, {q}, {s1})")
        return (cands[0], q)

    def distance(self, x: Multicurve, y: Multicurve) -> int:
        return farey_distance(self.slope(x), self.slope(y))

    # orientation signs of the twist generators in slope coordinates,
    # computed lazily: D_{u_inf} sends 0/1 to (s_inf)/1.
    _sign_inf: int = 0
    _sign_zero: int = 0

    def _twist_signs(self):
        if not self._sign_inf:
            img = apply_word(
                MappingClassWord((TwistLetter(self.u_inf.coords, AffineExpr(0, 1)),)),
                0,
                self.u_zero,
            )
            p, q = self.slope(img)
            if (p, q) not in ((1, 1), (-1, 1)):
                raise FareyError("twist about u_inf is not a Farey translation")
            self._sign_inf = p
            img0 = apply_word(
                MappingClassWord((TwistLetter(self.u_zero.coords, AffineExpr(0, 1)),)),
                0,
                self.u_inf,
            )
            p0, q0 = self.slope(img0)
            if (abs(p0), q0) != (1, 1):
                raise FareyError("twist about u_zero is not a Farey translation")
            self._sign_zero = 1 if (p0, q0) == (1, 1) else -1
        return self._sign_inf, self._sign_zero

    def curve(self, p: int, q: int) -> Multicurve:
        """The curve of slope p/q, built by a verified twist word."""
        if q < 0:
            p, q = -p, -q
        if gcd(abs(p), abs(q)) != 1:
            raise FareyError("slope must be a coprime pair")
        if q == 0:
            return self.u_inf
        if p == 0:
            return self.u_zero
        s_inf, s_zero = self._twist_signs()

        def nearest(a, b):
            if b < 0:
                a, b = -a, -b
            return (2 * a + b) // (2 * b)

        ops = []  # peeled outermost-first; leftmost letter applied last
        pp, qq = p, q
        guard = 0
        while not (qq == 0 or pp == 0):
            guard += 1
            if guard > 512:
                raise FareyError("slope construction did not terminate")
            if abs(pp) >= abs(qq):
                k = nearest(pp, qq)
                ops.append((self.u_inf.coords, k * s_inf))
                pp -= k * qq
            else:
                k = nearest(qq, pp)
                ops.append((self.u_zero.coords, k * s_zero))
                qq -= k * pp
        base = self.u_inf if qq == 0 else self.u_zero
        word = MappingClassWord(
            tuple(TwistLetter(c, AffineExpr(0, k)) for c, k in ops if k)
        )
        out = apply_word(word, 0, base)
        want = (p, q) if q > 0 else ((abs(p), 0))
        if self.slope(out) != want:
            raise FareyError(
                f"slope construction inconsistent: want {want} got {self.slope(out)}"
            )
        return out
