"""Surfaces, ideal triangulations and normal coordinates.

A surface of genus g with b >= 1 punctures (boundary circles are treated as
punctures throughout) carries a fixed ideal triangulation.  Isotopy classes
of multicurves are encoded by their geometric intersection numbers with the
triangulation edges: one nonnegative integer per edge, subject to the
triangle inequalities and a parity condition in every triangle.  All
arithmetic is exact; weights are arbitrary-precision integers.

Triangle encoding: a triangle is an ordered triple of *directed* edge
labels, listed counterclockwise.  Edge e has directed labels ``e`` and
``~e`` (two's complement).  Every directed label occurs exactly once in the
whole triangulation.
"""

from __future__ import annotations

from dataclasses import dataclass


def norm_label(label: int) -> int:
    """Edge index of a directed label."""
    return label if label >= 0 else ~label


@dataclass(frozen=True)
class Surface:
    """Topological type: genus and puncture count (boundaries as punctures)."""

    genus: int
    punctures: int

    def __post_init__(self) -> None:
        if self.genus < 0 or self.punctures < 0:
            raise ValueError("genus and puncture count must be nonnegative")
        if self.punctures == 0:
            raise ValueError(
                "closed surfaces are not supported; run examples on a "
                "once-punctured proxy (see package docs)"
            )
        if self.complexity < 1:
            raise ValueError(
                f"surface S_{self.genus},{self.punctures} has complexity "
                f"{self.complexity} < 1; no essential proper subsurfaces"
            )
        if self.euler_characteristic >= 0:
            raise ValueError("surface must have negative Euler characteristic")

    @property
    def complexity(self) -> int:
        return 3 * self.genus - 3 + self.punctures

    @property
    def euler_characteristic(self) -> int:
        return 2 - 2 * self.genus - self.punctures

    @property
    def num_edges(self) -> int:
        return 6 * self.genus - 6 + 3 * self.punctures

    @property
    def num_triangles(self) -> int:
        return 4 * self.genus - 4 + 2 * self.punctures

    def __str__(self) -> str:
        return f"S_{self.genus},{self.punctures}"


class Triangulation:
    """An ideal triangulation given by ccw triples of directed edge labels."""

    __slots__ = (
        "triangles",
        "num_edges",
        "side",
        "vertices",
        "vertex_of_label",
        "_hash",
    )

    @staticmethod
    def _rotate_min(t):
        k = t.index(min(t))
        return (t[k], t[(k + 1) % 3], t[(k + 2) % 3])

    def __init__(self, triangles):
        triangles = tuple(self._rotate_min(tuple(t)) for t in triangles)
        seen = set()
        for t in triangles:
            if len(t) != 3:
                raise ValueError("triangles must be triples")
            for lab in t:
                if lab in seen:
                    raise ValueError(f"directed label {lab} occurs twice")
                seen.add(lab)
        num_edges = len(seen) // 2
        for e in range(num_edges):
            if e not in seen or ~e not in seen:
                raise ValueError("edge labels must be 0..E-1, each with both signs")
        if len(seen) != 2 * len(triangles) * 3 // 2:
            raise ValueError("label count mismatch")

        side = {}
        for i, t in enumerate(triangles):
            for s, lab in enumerate(t):
                side[lab] = (i, s)

        object.__setattr__(self, "triangles", triangles)
        object.__setattr__(self, "num_edges", num_edges)
        object.__setattr__(self, "side", side)

        # Vertex orbits of the corner walk: sigma(x) = ~prev(x) is the next
        # outgoing directed edge counterclockwise around tail(x).
        orbits = []
        vertex_of_label = {}
        unseen = set(side)
        while unseen:
            start = min(unseen)
            orbit = []
            x = start
            while True:
                orbit.append(x)
                unseen.discard(x)
                i, s = side[x]
                x = ~triangles[i][(s + 2) % 3]
                if x == start:
                    break
            for lab in orbit:
                vertex_of_label[lab] = len(orbits)
            orbits.append(tuple(orbit))
        object.__setattr__(self, "vertices", tuple(orbits))
        object.__setattr__(self, "vertex_of_label", vertex_of_label)
        object.__setattr__(self, "_hash", hash(triangles))

    # -- basic structure ---------------------------------------------------

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        return isinstance(other, Triangulation) and self.triangles == other.triangles

    def __repr__(self) -> str:
        return f"Triangulation({len(self.triangles)} triangles, {self.num_edges} edges)"

    @property
    def num_triangles(self) -> int:
        return len(self.triangles)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def genus(self) -> int:
        # V - E + T = 2 - 2g for the closed-up complex.
        chi = self.num_vertices - self.num_edges + self.num_triangles
        g2 = 2 - chi
        if g2 % 2:
            raise ValueError("non-orientable or broken gluing")
        return g2 // 2

    @property
    def surface(self) -> Surface:
        return Surface(self.genus, self.num_vertices)

    def triangle_of(self, label: int):
        """Triple containing `label`, rotated so it comes first."""
        i, s = self.side[label]
        t = self.triangles[i]
        return (t[s], t[(s + 1) % 3], t[(s + 2) % 3])

    def is_flippable(self, e: int) -> bool:
        return self.side[e][0] != self.side[~e][0]

    def square(self, e: int):
        """Sides (A, B, C, D) ccw around the square of e; (A,C), (B,D) opposite."""
        if not self.is_flippable(e):
            raise ValueError(f"edge {e} is not flippable (self-folded square)")
        _, a, b = self.triangle_of(e)
        _, c, d = self.triangle_of(~e)
        return a, b, c, d

    def flip(self, e: int) -> "Triangulation":
        """Replace the diagonal e of its square: (e,A,B),(~e,C,D) -> (e,D,A),(~e,B,C)."""
        a, b, c, d = self.square(e)
        i1 = self.side[e][0]
        i2 = self.side[~e][0]
        tris = list(self.triangles)
        tris[i1] = (e, d, a)
        tris[i2] = (~e, b, c)
        return Triangulation(tris)

    def flip_inverse(self, e: int) -> "Triangulation":
        """Inverse of `flip`: (e,A,B),(~e,C,D) -> (e,B,C),(~e,D,A)."""
        a, b, c, d = self.square(e)
        i1 = self.side[e][0]
        i2 = self.side[~e][0]
        tris = list(self.triangles)
        tris[i1] = (e, b, c)
        tris[i2] = (~e, d, a)
        return Triangulation(tris)

    def flip_weight(self, e: int, w) -> int:
        """New weight of the flipped edge e for the coordinate vector w."""
        a, b, c, d = self.square(e)
        wa, wb, wc, wd = (w[norm_label(x)] for x in (a, b, c, d))
        return max(wa + wc, wb + wd) - w[e]

    def vertex_link(self, v: int):
        """Normal coordinates of the peripheral curve around vertex v."""
        w = [0] * self.num_edges
        for lab in self.vertices[v]:
            w[norm_label(lab)] += 1
        return tuple(w)

    def vertex_links(self):
        return [self.vertex_link(v) for v in range(self.num_vertices)]

    def relabel(self, mapping) -> "Triangulation":
        """Apply a signed-label mapping (dict on directed labels) to triples."""
        return Triangulation(
            tuple(tuple(mapping[lab] for lab in t) for t in self.triangles)
        )


# -- canonical triangulations ----------------------------------------------


def _once_punctured_fan(genus: int) -> Triangulation:
    """The 4g-gon a1 b1 a1^-1 b1^-1 ... with fan diagonals from corner 0."""
    n = 4 * genus
    # Directed polygon sides s_0..s_{n-1} (ccw); s_{4k} and s_{4k+2} carry the
    # same edge with reversal, likewise s_{4k+1}, s_{4k+3}.
    side_label = {}
    for k in range(genus):
        ea, eb = 2 * k, 2 * k + 1
        side_label[4 * k] = ea
        side_label[4 * k + 2] = ~ea
        side_label[4 * k + 1] = eb
        side_label[4 * k + 3] = ~eb
    # Diagonals d_i from corner 0 to corner i, i = 2..n-2.
    diag = {}
    next_edge = 2 * genus
    for i in range(2, n - 1):
        diag[i] = next_edge
        next_edge += 1
    tris = []
    for i in range(1, n - 1):
        first = side_label[0] if i == 1 else diag[i]
        last = side_label[n - 1] if i == n - 2 else ~diag[i + 1]
        tris.append((first, side_label[i], last))
    return Triangulation(tris)


def _thrice_punctured_sphere() -> Triangulation:
    return Triangulation([(0, 1, 2), (~2, ~1, ~0)])


def _subdivide(tri: Triangulation, index: int) -> Triangulation:
    """Add an ideal vertex inside triangle `index` (three new spoke edges)."""
    x, y, z = tri.triangles[index]
    e = tri.num_edges
    sx, sy, sz = e, e + 1, e + 2  # spoke from the center toward tail(x), tail(y), tail(z)
    tris = list(tri.triangles)
    tris[index] = (x, ~sy, sx)
    tris.append((y, ~sz, sy))
    tris.append((z, ~sx, sz))
    return Triangulation(tris)


def build_canonical_triangulation(surface: Surface) -> Triangulation:
    """Deterministic ideal triangulation of S_{g,b}; a pure function of (g, b)."""
    if surface.genus == 0:
        base, punctures = _thrice_punctured_sphere(), 3
    else:
        base, punctures = _once_punctured_fan(surface.genus), 1
    tri = base
    for _ in range(surface.punctures - punctures):
        tri = _subdivide(tri, 0)
    got = tri.surface
    if got != surface:
        raise AssertionError(f"built {got}, wanted {surface}")
    if tri.num_edges != surface.num_edges:
        raise AssertionError("edge count mismatch")
    return tri


# -- normal coordinates ------------------------------------------------------


def corner_counts(tri: Triangulation, w, index: int):
    """Arc counts ((xy), (yz), (zx)) in triangle (x, y, z); negative if invalid."""
    x, y, z = tri.triangles[index]
    wx, wy, wz = w[norm_label(x)], w[norm_label(y)], w[norm_label(z)]
    s = wx + wy + wz
    if s % 2:
        return None
    h = s // 2
    return (h - wz, h - wx, h - wy)


def validate(tri: Triangulation, w) -> bool:
    """True iff w satisfies triangle inequalities, parity and nonnegativity."""
    if len(w) != tri.num_edges:
        return False
    if any(x < 0 for x in w):
        return False
    for i in range(tri.num_triangles):
        counts = corner_counts(tri, w, i)
        if counts is None or any(c < 0 for c in counts):
            return False
    return True


# -- serialization -----------------------------------------------------------

FORMAT_VERSION = "curvecomplex.v1"


def coords_to_text(surface: Surface, w) -> str:
    weights = ",".join(str(x) for x in w)
    return f"{FORMAT_VERSION} ncoords g={surface.genus} b={surface.punctures} w={weights}"


def coords_from_text(text: str):
    parts = text.strip().split()
    if len(parts) != 5 or parts[0] != FORMAT_VERSION or parts[1] != "ncoords":
        raise ValueError(f"bad ncoords serialization: {text!r}")
    g = int(parts[2].removeprefix("g="))
    b = int(parts[3].removeprefix("b="))
    w = tuple(int(x) for x in parts[4].removeprefix("w=").split(","))
    surface = Surface(g, b)
    tri = build_canonical_triangulation(surface)
    if not validate(tri, w):
        raise ValueError("serialized weights fail normal-coordinate invariants")
    return surface, w


def triangulation_to_text(tri: Triangulation) -> str:
    body = ";".join(",".join(str(lab) for lab in t) for t in tri.triangles)
    return f"{FORMAT_VERSION} triangulation {body}"


def triangulation_from_text(text: str) -> Triangulation:
    parts = text.strip().split()
    if len(parts) != 3 or parts[0] != FORMAT_VERSION or parts[1] != "triangulation":
        raise ValueError(f"bad triangulation serialization: {text!r}")
    tris = [
        tuple(int(x) for x in chunk.split(","))
        for chunk in parts[2].split(";")
    ]
    return Triangulation(tris)
