"""Counting region colorings of a diagram by a partial ternary algebra.

A coloring assigns a symbol to every face so that every local constraint
holds: bracket(a,b,c)=d at crossings (horizontal table at classical ones,
vertical at virtual ones) and a.b defined and equal to the middle face at
trivalent vertices.  The count is the diagram invariant of interest.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .algebra import VirtualNAlgebra
from .diagram import Diagram

BRUTE_FORCE_FACE_LIMIT = 8


class LimitExceeded(ValueError):
    pass


@dataclass(frozen=True)
class ColoringCount:
    value: int
    colorings: Optional[Tuple[Tuple[int, ...], ...]] = None  # face id -> symbol


def _compiled_constraints(diagram: Diagram):
    out = []
    for lc in diagram.constraints():
        if lc.kind == "PRODUCT":
            out.append(("P", (lc.roles["a"], lc.roles["b"], lc.roles["ab"])))
        elif lc.kind == "HORIZONTAL_BRACKET":
            out.append(
                ("H", (lc.roles["a"], lc.roles["b"], lc.roles["c"], lc.roles["d"]))
            )
        else:
            out.append(
                ("V", (lc.roles["a"], lc.roles["b"], lc.roles["c"], lc.roles["d"]))
            )
    return out


def _satisfied(kind, faces, coloring, alg: VirtualNAlgebra) -> bool:
    if kind == "P":
        a, b, ab = (coloring[f] for f in faces)
        return alg.product(a, b) == ab
    table = alg.horizontal if kind == "H" else alg.vertical
    a, b, c, d = (coloring[f] for f in faces)
    return table(a, b, c) == d


def count_colorings(
    diagram: Diagram, alg: VirtualNAlgebra, enumerate_all: bool = False
) -> ColoringCount:
    """Exact coloring count by backtracking with unit propagation.

    Faces are assigned in order of descending constraint degree (ties by
    id); once all but one face of a constraint are colored the last one is
    forced through the relevant table (an undefined product prunes).
    """
    n = alg.n
    faces = diagram.faces()
    nfaces = len(faces)
    constraints = _compiled_constraints(diagram)

    degree = [0] * nfaces
    for _, fs in constraints:
        for f in fs:
            degree[f] += 1
    order = sorted(range(nfaces), key=lambda f: (-degree[f], f))
    rank = {f: i for i, f in enumerate(order)}

    # constraints watched by the latest-assigned face they mention
    watchers: List[List[Tuple[str, Tuple[int, ...]]]] = [[] for _ in range(nfaces)]
    for kind, fs in constraints:
        last = max(fs, key=lambda f: rank[f])
        watchers[last].append((kind, fs))

    h, v, p = alg.horizontal, alg.vertical, alg.product
    coloring = [-1] * nfaces
    found: List[Tuple[int, ...]] = []
    count = 0

    def ok(face: int) -> bool:
        for kind, fs in watchers[face]:
            if not _satisfied(kind, fs, coloring, alg):
                return False
        return True

    def forced_value(i: int) -> Optional[List[int]]:
        """Domain for the i-th face in assignment order, possibly forced."""
        face = order[i]
        for kind, fs in watchers[face]:
            others = [f for f in fs if f != face]
            if any(coloring[f] < 0 for f in others):
                continue
            # face may occur several times in fs; a forced value is only
            # extracted when it occurs exactly once
            if fs.count(face) != 1:
                continue
            if kind == "P":
                a, b, ab = fs
                if face == ab:
                    val = p(coloring[a], coloring[b])
                    return [] if val is None else [val]
                if face == b:
                    hits = [
                        y for y in range(n) if p(coloring[a], y) == coloring[ab]
                    ]
                    return hits
                hits = [x for x in range(n) if p(x, coloring[b]) == coloring[ab]]
                return hits
            table = h if kind == "H" else v
            a, b, c, d = fs
            if face == d:
                return [table(coloring[a], coloring[b], coloring[c])]
            if face == c:
                row = table.cells[coloring[a]][coloring[b]]
                return [row.index(coloring[d])]
            if face == b:
                mat = table.cells[coloring[a]]
                return [
                    y for y in range(n) if mat[y][coloring[c]] == coloring[d]
                ]
            return [
                x
                for x in range(n)
                if table.cells[x][coloring[b]][coloring[c]] == coloring[d]
            ]
        return None

    def rec(i: int):
        nonlocal count
        if i == nfaces:
            count += 1
            if enumerate_all:
                found.append(tuple(coloring))
            return
        face = order[i]
        domain = forced_value(i)
        if domain is None:
            domain = range(n)
        for value in domain:
            coloring[face] = value
            if ok(face):
                rec(i + 1)
            coloring[face] = -1

    rec(0)
    return ColoringCount(count, tuple(found) if enumerate_all else None)


def count_tangle_colorings(
    diagram: Diagram, alg: VirtualNAlgebra, enumerate_all: bool = False
) -> ColoringCount:
    """Same count with boundary faces free; legs impose no constraints, so
    this is the plain count over the tangle's face set."""
    return count_colorings(diagram, alg, enumerate_all)


def brute_force_count(
    diagram: Diagram, alg: VirtualNAlgebra, enumerate_all: bool = False
) -> ColoringCount:
    """Independent oracle: plain exhaustive iteration over all n^F maps."""
    faces = diagram.faces()
    if len(faces) > BRUTE_FORCE_FACE_LIMIT:
        raise LimitExceeded(
            f"{len(faces)} faces exceed the brute-force limit "
            f"{BRUTE_FORCE_FACE_LIMIT}"
        )
    constraints = _compiled_constraints(diagram)
    count = 0
    found = []
    for assignment in itertools.product(range(alg.n), repeat=len(faces)):
        if all(_satisfied(kind, fs, assignment, alg) for kind, fs in constraints):
            count += 1
            if enumerate_all:
                found.append(tuple(assignment))
    return ColoringCount(count, tuple(found) if enumerate_all else None)
