"""Exact operations on isotopy classes of multicurves.

Everything is keyed to one ambient triangulation (normally the canonical
one for the surface).  Isotopy classes coincide exactly with coordinate
vectors, so equality of classes is equality of tuples.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import kernel, moves, strands
from .kernel import Surface, Triangulation, build_canonical_triangulation, validate
from .strands import StrandError


class CurveError(Exception):
    pass


# -- short-position cache -----------------------------------------------------

_short_cache: dict = {}


def short_data(tri: Triangulation, curve):
    """(flip sequence, short triangulation, short coords) for a single curve."""
    key = (tri.triangles, tuple(curve))
    entry = _short_cache.get(key)
    if entry is None:
        entry = moves.short_position(tri, curve)
        if len(_short_cache) > 8192:
            _short_cache.clear()
        _short_cache[key] = entry
    return entry


def curve_intersection(tri: Triangulation, u, y) -> int:
    """i(u, y) for a single primitive curve u and any multicurve y."""
    if tuple(u) == tuple(y):
        return 0
    flips, st, sw = short_data(tri, u)
    _, (yv,) = moves.transport(tri, flips, [y])
    return strands.ShortPosition(st, sw).core_intersection(yv)


def _intersection_via(tri: Triangulation, x, y) -> int:
    total = 0
    for comp, mult in strands.components(tri, x):
        total += mult * curve_intersection(tri, comp, y)
    return total


def intersection_number(tri: Triangulation, x, y) -> int:
    """Exact geometric intersection number of two multicurves.

    One side is decomposed into primitive components, each carried to a
    short position where crossings of the other side are counted.  Curves
    that admit no two-point position (separating curves that cut off a
    puncture-free piece) are counted from the other side.
    """
    if len(x) != tri.num_edges or len(y) != tri.num_edges:
        raise CurveError("coordinate length does not match the triangulation")
    if tuple(x) == tuple(y):
        return 0
    if sum(x) > sum(y):
        x, y = y, x
    if sum(x) == 0:
        return 0
    try:
        return _intersection_via(tri, x, y)
    except moves.MoveError:
        if sum(y) == 0:
            return 0
        return _intersection_via(tri, y, x)


# -- multicurves --------------------------------------------------------------


@dataclass(frozen=True)
class Multicurve:
    """An isotopy class of disjoint essential curves in normal coordinates."""

    tri: Triangulation
    coords: tuple

    _components: list = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not validate(self.tri, self.coords):
            raise CurveError(f"invalid normal coordinates {self.coords}")
        object.__setattr__(self, "coords", tuple(self.coords))

    @property
    def is_empty(self) -> bool:
        return not any(self.coords)

    def components(self):
        """[(primitive Multicurve, multiplicity)], lexicographic order."""
        if self._components is None:
            comps = [
                (Multicurve(self.tri, c), m)
                for c, m in strands.components(self.tri, self.coords)
            ]
            object.__setattr__(self, "_components", comps)
        return self._components

    def component_curves(self):
        return [c for c, _ in self.components()]

    def is_reduced(self) -> bool:
        """True iff no component is repeated (the analysis-facing invariant)."""
        return all(m == 1 for _, m in self.components())

    def is_single_curve(self) -> bool:
        comps = self.components()
        return len(comps) == 1 and comps[0][1] == 1

    def is_peripheral_free(self) -> bool:
        links = set(self.tri.vertex_links())
        return all(c.coords not in links for c in self.component_curves())

    def check_analysis_ready(self) -> None:
        if self.is_empty:
            raise CurveError("empty multicurve")
        if not self.is_reduced():
            raise CurveError("multicurve has repeated components")
        if not self.is_peripheral_free():
            raise CurveError("multicurve has a peripheral component")

    def union(self, other: "Multicurve") -> "Multicurve":
        if intersection_number(self.tri, self.coords, other.coords) != 0:
            raise CurveError("union of crossing multicurves is not a multicurve")
        return Multicurve(
            self.tri, tuple(a + b for a, b in zip(self.coords, other.coords))
        )

    def intersection(self, other: "Multicurve") -> int:
        return intersection_number(self.tri, self.coords, other.coords)

    def __str__(self) -> str:
        return f"Multicurve{self.coords}"


def reassemble(curve_mult_pairs):
    """Weighted coordinate sum of disjoint components; inverse of components."""
    pairs = list(curve_mult_pairs)
    if not pairs:
        raise CurveError("nothing to reassemble")
    tri = pairs[0][0].tri
    w = [0] * tri.num_edges
    for c, m in pairs:
        for e in range(tri.num_edges):
            w[e] += m * c.coords[e]
    return Multicurve(tri, tuple(w))


# -- mapping class words -------------------------------------------------------


@dataclass(frozen=True)
class AffineExpr:
    """Exponent a*n + b."""

    a: int
    b: int

    def __call__(self, n: int) -> int:
        return self.a * n + self.b

    def __neg__(self) -> "AffineExpr":
        return AffineExpr(-self.a, -self.b)

    def __str__(self) -> str:
        if self.a == 0:
            return str(self.b)
        head = {1: "n", -1: "-n"}.get(self.a, f"{self.a}n")
        if self.b == 0:
            return head
        return f"{head}{self.b:+d}"


@dataclass(frozen=True)
class TwistLetter:
    """D_curve^{exp}; the twist is the repo-wide right twist."""

    curve: tuple
    exp: AffineExpr
    name: str = ""


@dataclass(frozen=True)
class BlockLetter:
    """(sub-word)^{exp}: lets pseudo-Anosov compositions be iterated."""

    word: "MappingClassWord"
    exp: AffineExpr


@dataclass(frozen=True)
class MappingClassWord:
    """Composition of twist powers; leftmost letter applied last."""

    letters: tuple

    def inverse(self) -> "MappingClassWord":
        inv = []
        for letter in reversed(self.letters):
            if isinstance(letter, TwistLetter):
                inv.append(TwistLetter(letter.curve, -letter.exp, letter.name))
            else:
                inv.append(BlockLetter(letter.word, -letter.exp))
        return MappingClassWord(tuple(inv))

    def then(self, other: "MappingClassWord") -> "MappingClassWord":
        """self composed after other (self applied last)."""
        return MappingClassWord(self.letters + other.letters)

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def apply_vector(self, tri: Triangulation, n: int, vector):
        v = list(vector)
        for letter in reversed(self.letters):
            k = letter.exp(n)
            if k == 0:
                continue
            if isinstance(letter, TwistLetter):
                v = moves.twist_move(tri, letter.curve).apply(v, k)
            else:
                sub = letter.word if k > 0 else letter.word.inverse()
                for _ in range(abs(k)):
                    v = sub.apply_vector(tri, 1, v)
        return v

    def __str__(self) -> str:
        if not self.letters:
            return "id"
        parts = []
        for letter in self.letters:
            if isinstance(letter, TwistLetter):
                name = letter.name or f"T{letter.curve}"
                parts.append(f"D[{name}]^{{{letter.exp}}}")
            else:
                parts.append(f"({letter.word})^{{{letter.exp}}}")
        return " ".join(parts)


def twist_word(curve: Multicurve, a: int = 0, b: int = 1, name: str = "") -> MappingClassWord:
    """The single-letter word D_curve^{a n + b}."""
    if not curve.is_single_curve():
        raise CurveError("twists are about single curves")
    return MappingClassWord((TwistLetter(curve.coords, AffineExpr(a, b), name),))


def apply_word(word: MappingClassWord, n: int, m: Multicurve) -> Multicurve:
    """Image of m under the word with exponents evaluated at n."""
    return Multicurve(m.tri, tuple(word.apply_vector(m.tri, n, m.coords)))


def is_binding(system) -> bool:
    """True iff the curve system decomposes the surface into disks or
    once-punctured disks.

    Accepts a Multicurve or a list of (possibly crossing) Multicurves; a
    complete marking's base together with its transversals binds.
    """
    from .arrangement import is_binding as _binding

    if isinstance(system, Multicurve):
        if system.is_empty:
            return False
        return _binding(system.tri, [c.coords for c in system.component_curves()])
    curves = list(system)
    if not curves:
        return False
    tri = curves[0].tri
    coords = []
    for c in curves:
        coords.extend(comp.coords for comp in c.component_curves())
    return _binding(tri, coords)


# -- markings -----------------------------------------------------------------


@dataclass(frozen=True)
class Marking:
    """Base multicurve with transversal curves for (some of) its components."""

    base: Multicurve
    transversals: tuple  # pairs (base_index, Multicurve), base_index into component list

    def __post_init__(self):
        tri = self.base.tri
        self.base.check_analysis_ready()
        comps = self.base.component_curves()
        for idx, trans in self.transversals:
            if not (0 <= idx < len(comps)):
                raise CurveError("transversal index out of range")
            if not trans.is_single_curve():
                raise CurveError("transversal must be a single curve")
            hits = trans.intersection(comps[idx])
            if hits == 0:
                raise CurveError("transversal misses its base curve")
            if hits > 2:
                raise CurveError(
                    f"transversal meets its base curve {hits} > 2 times"
                )
            for j, other in enumerate(comps):
                if j != idx and trans.intersection(other) != 0:
                    raise CurveError("transversal crosses another base curve")

    @property
    def tri(self) -> Triangulation:
        return self.base.tri

    def is_complete(self) -> bool:
        comps = self.base.component_curves()
        surface = self.tri.surface
        if len(comps) != surface.complexity:
            return False
        covered = {idx for idx, _ in self.transversals}
        return covered == set(range(len(comps)))

    def all_curves(self):
        """Base components then transversals, in deterministic order."""
        out = list(self.base.component_curves())
        out.extend(t for _, t in sorted(self.transversals, key=lambda p: p[0]))
        return out


def marking_curves(ref) -> list:
    """The curve list of a Marking or the components of a Multicurve."""
    if isinstance(ref, Marking):
        return ref.all_curves()
    return ref.component_curves()


def transport_marking(word: MappingClassWord, n: int, mu: Marking) -> Marking:
    """Image of a marking under a mapping-class word."""
    old_comps = mu.base.component_curves()
    new_base = apply_word(word, n, mu.base)
    new_comps = [c.coords for c in new_base.component_curves()]
    transversals = []
    for idx, trans in mu.transversals:
        moved_base = apply_word(word, n, old_comps[idx])
        new_idx = new_comps.index(moved_base.coords)
        transversals.append((new_idx, apply_word(word, n, trans)))
    return Marking(new_base, tuple(transversals))


# -- small-curve workshop ------------------------------------------------------


def enumerate_curves(
    tri: Triangulation,
    max_length: int = 8,
    allowed_triangles=None,
    limit: int = 512,
):
    """Deterministic catalogue of single curves found by closed transverse walks.

    Walks are itineraries through triangles (never leaving `allowed_triangles`
    when given); the crossing counts of a walk are kept when they form valid
    normal coordinates of a single non-peripheral primitive curve.  Ordered by
    (total weight, coords).
    """
    links = set(tri.vertex_links())
    found = set()
    n_tri = tri.num_triangles

    def walk(start_label, seq, counts, length):
        if len(found) >= limit * 4:
            return
        i, _ = tri.side[seq[-1]]
        tpl = tri.triangles[i]
        for out in tpl:
            if out == seq[-1]:
                continue
            nxt = ~out
            j = tri.side[nxt][0]
            if allowed_triangles is not None and j not in allowed_triangles:
                continue
            counts[kernel.norm_label(out)] += 1
            if nxt == start_label:
                key = tuple(counts)
                if validate(tri, key) and key not in links and key not in found:
                    comps = strands.components(tri, key)
                    if len(comps) == 1 and comps[0][1] == 1 and comps[0][0] == key:
                        found.add(key)
            if length + 1 < max_length:
                seq.append(nxt)
                walk(start_label, seq, counts, length + 1)
                seq.pop()
            counts[kernel.norm_label(out)] -= 1

    for e in range(tri.num_edges):
        for lab in (e, ~e):
            i = tri.side[lab][0]
            if allowed_triangles is not None and i not in allowed_triangles:
                continue
            counts = [0] * tri.num_edges
            walk(lab, [lab], counts, 0)

    ordered = sorted(found, key=lambda c: (sum(c), c))
    return [Multicurve(tri, c) for c in ordered[:limit]]
