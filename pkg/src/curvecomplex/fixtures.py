"""Canonical fixtures: named curves, markings and scenario ingredients.

Everything is discovered deterministically from the curve catalogue of the
canonical triangulation, then validated; nothing here is hand-entered
magic.  The twisted-spiral configuration lives on the twice-punctured
torus: a nonseparating curve whose complement is a four-ended sphere piece
carrying an exact slope chart, a partial pseudo-Anosov built from two twists
inside that piece, and pants decompositions arranged around them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .curves import (
    AffineExpr,
    BlockLetter,
    CurveError,
    Marking,
    MappingClassWord,
    Multicurve,
    TwistLetter,
    enumerate_curves,
    intersection_number,
)
from .kernel import Surface, Triangulation, build_canonical_triangulation
from .metrics import SubsurfaceSpec
from .pieces import cut_system


class FixtureError(Exception):
    pass


_catalogues: dict = {}


def catalogue(tri: Triangulation, max_length: int = 8):
    key = (tri.triangles, max_length)
    got = _catalogues.get(key)
    if got is None:
        got = enumerate_curves(tri, max_length=max_length)
        _catalogues[key] = got
    return got


def surface_setup(genus: int, punctures: int):
    s = Surface(genus, punctures)
    tri = build_canonical_triangulation(s)
    return s, tri


def find_disjoint_pair(curves, cross=(), tri=None):
    """First disjoint non-isotopic pair, each curve crossing everything in
    `cross`."""
    for i, x in enumerate(curves):
        if any(x.intersection(c) == 0 for c in cross):
            continue
        for y in curves[i + 1:]:
            if x.intersection(y) != 0 or x.coords == y.coords:
                continue
            if any(y.intersection(c) == 0 for c in cross):
                continue
            return x, y
    raise FixtureError("no disjoint pair with the requested crossings")


def complete_marking(tri: Triangulation, base_curves) -> Marking:
    """Complete marking over the given pants decomposition."""
    base = base_curves[0]
    for b in base_curves[1:]:
        base = base.union(b)
    cat = catalogue(tri) + catalogue(tri, 10)
    transversals = []
    comps = base.component_curves()
    for idx, comp in enumerate(comps):
        found = None
        for cand in cat:
            hits = cand.intersection(comp)
            if hits not in (1, 2):
                continue
            if any(cand.intersection(o) != 0 for j, o in enumerate(comps) if j != idx):
                continue
            found = cand
            break
        if found is None:
            raise FixtureError(f"no transversal found for base curve {comp.coords}")
        transversals.append((idx, found))
    mk = Marking(base, tuple(transversals))
    if not mk.is_complete():
        raise FixtureError("marking is not complete")
    return mk


# -- the once-punctured torus family ---------------------------------------------


@dataclass
class TorusFixture:
    surface: Surface
    tri: Triangulation
    alpha: Multicurve  # slope 1/0
    p: Multicurve      # slope 0/1
    marking: Marking

    @classmethod
    def build(cls):
        s, tri = surface_setup(1, 1)
        cat = catalogue(tri)
        p, alpha = cat[0], cat[1]
        mu = Marking(p, ((0, alpha),))
        return cls(s, tri, alpha, p, mu)


# -- the twisted-spiral configuration on the twice-punctured torus ----------------


@dataclass
class SpiralFixture:
    """All ingredients of the spiraling-sequence scenarios.

    alpha is nonseparating; Y is its complement (a four-ended sphere piece);
    psi is the right-left twist composition generating a pseudo-Anosov on Y;
    gamma lives in Y; the pants decompositions a (crossing alpha and gamma)
    and b (containing alpha, crossing gamma) drive the four sequences.
    """

    surface: Surface
    tri: Triangulation
    alpha: Multicurve
    gamma: Multicurve
    psi_u: Multicurve
    psi_v: Multicurve
    psi: MappingClassWord
    piece: SubsurfaceSpec
    c01: Multicurve  # pants decomposition, all curves crossing alpha
    a: Multicurve    # pants decomposition crossing alpha and gamma
    b: Multicurve    # pants decomposition containing alpha, crossing gamma
    b2: Multicurve
    marking: Marking

    @classmethod
    def build(cls):
        s, tri = surface_setup(1, 2)
        cat = catalogue(tri)
        alpha = cat[0]
        cs = cut_system(tri, alpha)
        if len(cs.regions) != 1 or cs.regions[0].complexity != 1:
            raise FixtureError("alpha complement is not a complexity-one piece")
        chart = cs.chart(0)
        to_canon = lambda c: Multicurve(tri, cs.from_short(c.coords))
        u = to_canon(chart.u_inf)
        v = to_canon(chart.u_zero)
        gamma = u
        psi = MappingClassWord(
            (
                TwistLetter(u.coords, AffineExpr(0, 1), name="psi_u"),
                TwistLetter(v.coords, AffineExpr(0, -1), name="psi_v"),
            )
        )
        pool = [c for c in cat if c.coords not in (alpha.coords,)]
        c11, c12 = find_disjoint_pair(pool, cross=(alpha,))
        c01 = c11.union(c12)
        a1, a2 = find_disjoint_pair(pool, cross=(alpha, gamma))
        a = a1.union(a2)
        b2 = next(
            c
            for c in pool
            if c.intersection(alpha) == 0
            and c.coords != alpha.coords
            and c.intersection(gamma) != 0
        )
        b = alpha.union(b2)
        m2 = next(
            c
            for c in pool
            if c.intersection(alpha) == 0 and c.coords not in (alpha.coords, b2.coords)
        )
        try:
            mu = complete_marking(tri, [alpha, m2])
        except FixtureError:
            mu = complete_marking(tri, [alpha, b2])
            m2 = b2
        piece = SubsurfaceSpec.complement_piece(alpha, 0)
        fx = cls(
            surface=s, tri=tri, alpha=alpha, gamma=gamma, psi_u=u, psi_v=v,
            psi=psi, piece=piece, c01=c01, a=a, b=b, b2=b2, marking=mu,
        )
        fx.validate()
        return fx

    def validate(self):
        tri = self.tri
        checks = [
            ("alpha-gamma disjoint", self.alpha.intersection(self.gamma) == 0),
            ("psi curves in piece", self.psi_u.intersection(self.alpha) == 0
             and self.psi_v.intersection(self.alpha) == 0),
            ("psi curves cross", self.psi_u.intersection(self.psi_v) > 0),
            ("c01 crosses alpha", all(
                c.intersection(self.alpha) > 0
                for c in self.c01.component_curves())),
            ("a crosses alpha", all(
                c.intersection(self.alpha) > 0
                for c in self.a.component_curves())),
            ("a crosses gamma", any(
                c.intersection(self.gamma) > 0
                for c in self.a.component_curves())),
            ("b contains alpha", self.alpha.coords in
             [c.coords for c in self.b.component_curves()]),
            ("b crosses gamma", self.b2.intersection(self.gamma) > 0),
            ("marking complete", self.marking.is_complete()),
        ]
        for label, ok in checks:
            if not ok:
                raise FixtureError(f"fixture check failed: {label}")

    def spiral_word(self) -> MappingClassWord:
        """n -> D_gamma^n after n iterations of psi."""
        return MappingClassWord(
            (
                TwistLetter(self.gamma.coords, AffineExpr(1, 0), name="gamma"),
                BlockLetter(self.psi, AffineExpr(1, 0)),
            )
        )

    def twist_only_word(self) -> MappingClassWord:
        return MappingClassWord(
            (TwistLetter(self.gamma.coords, AffineExpr(1, 0), name="gamma"),)
        )

    def constant_word(self) -> MappingClassWord:
        return MappingClassWord(())
