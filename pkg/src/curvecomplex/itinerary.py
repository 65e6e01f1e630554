"""Closed transverse loops as crossing itineraries, and their normal forms.

An itinerary is a cyclic list of directed labels: crossing edge |L| while
leaving the triangle that contains L.  Consecutive crossings share the
triangle entered in between.  On an ideal triangulation a loop with no
triangle-level backtrack is taut, so iterated spur cancellation computes the
normal coordinates of the loop's free homotopy class.
"""

from __future__ import annotations

from .kernel import Triangulation, norm_label


class ItineraryError(Exception):
    pass


def check_itinerary(tri: Triangulation, labels) -> None:
    n = len(labels)
    for i, lab in enumerate(labels):
        nxt = labels[(i + 1) % n]
        if tri.side[~lab][0] != tri.side[nxt][0]:
            raise ItineraryError(
                f"crossings {lab} -> {nxt} do not share a triangle"
            )


def normalize_itinerary(labels):
    """Cyclically cancel spurs (L, ~L); returns the reduced cyclic list."""
    out = list(labels)
    changed = True
    while changed and out:
        changed = False
        stack = []
        for lab in out:
            if stack and lab == ~stack[-1]:
                stack.pop()
                changed = True
            else:
                stack.append(lab)
        # cyclic wrap: cancel across the seam
        while len(stack) >= 2 and stack[0] == ~stack[-1]:
            stack.pop()
            stack.pop(0)
            changed = True
        out = stack
    return out


def itinerary_coords(tri: Triangulation, labels):
    """Normal coordinates of the loop's isotopy class."""
    reduced = normalize_itinerary(labels)
    if reduced:
        check_itinerary(tri, reduced)
    w = [0] * tri.num_edges
    for lab in reduced:
        w[norm_label(lab)] += 1
    return tuple(w)
