"""Ternary operation tables, partial products, and their defining relations.

A size-n structure lives on the symbols 1..n (files and printed tables are
1-based; internally everything is 0-based).  The three layers are:

* ``TernaryTable`` -- a total map (a,b,c) -> symbol stored as n stacked
  n x n matrices, indexed cells[a][b][c] (matrix a, row b, column c).
* ``PartialProduct`` -- an n x n table with possibly-undefined cells.
* ``VirtualTribracket`` / ``VirtualNAlgebra`` -- pairs/triples of the above
  subject to the relation families checked here.

Every relation has a citable name (III.i, vII, m.ii, R4, R5.3, vR5.4, ...).
Two axiom sets are distinguished: the ``standard`` set, under which both
bundled example algebras are valid, and the ``extended`` set which adds the
vR5.1/vR5.3 relations (the bundled size-4 algebra does not satisfy those;
see the README).  Partiality semantics come in two variants: ``vacuous``
(an equation instance is enforced only when every product subterm it
mentions is defined) and ``matched`` (two-product relations additionally
require both sides to be defined together).
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

Cells3 = tuple  # n x n x n nested tuples of 0-based ints
Cells2 = tuple  # n x n nested tuples of 0-based ints or None

VARIANTS = ("vacuous", "matched")
AXIOM_SETS = ("standard", "extended")


# ---------------------------------------------------------------------------
# types

@dataclass(frozen=True)
class TernaryTable:
    """Total ternary operation table; cells[a][b][c] is 0-based."""

    n: int
    cells: Cells3

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Sequence[int]]]) -> "TernaryTable":
        """Build from 1-based nested lists (n matrices of n rows)."""
        n = len(rows)
        cells = tuple(
            tuple(tuple(int(x) - 1 for x in row) for row in mat) for mat in rows
        )
        table = cls(n, cells)
        table._check_shape()
        return table

    def _check_shape(self) -> None:
        if len(self.cells) != self.n or any(
            len(mat) != self.n or any(len(row) != self.n for row in mat)
            for mat in self.cells
        ):
            raise ValueError("table is not n x n x n")
        for mat in self.cells:
            for row in mat:
                for x in row:
                    if not 0 <= x < self.n:
                        raise ValueError(f"symbol {x + 1} out of range 1..{self.n}")

    def __call__(self, a: int, b: int, c: int) -> int:
        return self.cells[a][b][c]

    def to_rows(self) -> list:
        """1-based nested lists, the file/paper convention."""
        return [[[x + 1 for x in row] for row in mat] for mat in self.cells]


@dataclass(frozen=True)
class PartialProduct:
    """Binary product table with possibly-undefined (None) cells."""

    n: int
    cells: Cells2

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Optional[int]]]) -> "PartialProduct":
        n = len(rows)
        cells = tuple(
            tuple(None if x is None else int(x) - 1 for x in row) for row in rows
        )
        prod = cls(n, cells)
        prod._check_shape()
        return prod

    @classmethod
    def total(cls, square: Sequence[Sequence[int]]) -> "PartialProduct":
        return cls.from_rows(square)

    def _check_shape(self) -> None:
        if len(self.cells) != self.n or any(len(row) != self.n for row in self.cells):
            raise ValueError("product table is not n x n")
        for row in self.cells:
            for x in row:
                if x is not None and not 0 <= x < self.n:
                    raise ValueError(f"symbol {x + 1} out of range 1..{self.n}")

    def __call__(self, a: int, b: int) -> Optional[int]:
        return self.cells[a][b]

    @property
    def holes(self) -> int:
        return sum(row.count(None) for row in self.cells)

    def to_rows(self) -> list:
        return [[None if x is None else x + 1 for x in row] for row in self.cells]


@dataclass(frozen=True)
class VirtualTribracket:
    horizontal: TernaryTable
    vertical: TernaryTable

    def __post_init__(self):
        if self.horizontal.n != self.vertical.n:
            raise ValueError("component tables have different carrier sizes")

    @property
    def n(self) -> int:
        return self.horizontal.n

    def is_valid(self) -> bool:
        return not failing_tribracket_axioms(self.horizontal, self.vertical)


@dataclass(frozen=True)
class VirtualNAlgebra:
    tribracket: VirtualTribracket
    product: PartialProduct

    def __post_init__(self):
        if self.tribracket.n != self.product.n:
            raise ValueError("product size differs from tribracket size")

    @property
    def n(self) -> int:
        return self.tribracket.n

    @property
    def horizontal(self) -> TernaryTable:
        return self.tribracket.horizontal

    @property
    def vertical(self) -> TernaryTable:
        return self.tribracket.vertical


# ---------------------------------------------------------------------------
# structural predicates

def is_latin_cube(t: TernaryTable) -> bool:
    """Every axis-parallel line is a permutation of the n symbols."""
    n, cells = t.n, t.cells
    full = frozenset(range(n))
    for i in range(n):
        for j in range(n):
            if frozenset(cells[i][j]) != full:
                return False
            if frozenset(cells[i][k][j] for k in range(n)) != full:
                return False
            if frozenset(cells[k][i][j] for k in range(n)) != full:
                return False
    return True


def is_partial_latin_square(p: PartialProduct) -> bool:
    """No defined symbol repeats in any row or column."""
    n, cells = p.n, p.cells
    for i in range(n):
        row = [x for x in cells[i] if x is not None]
        if len(row) != len(set(row)):
            return False
        col = [cells[j][i] for j in range(n) if cells[j][i] is not None]
        if len(col) != len(set(col)):
            return False
    return True


# ---------------------------------------------------------------------------
# relation instances
#
# Each checker returns the list of failing instances (empty means the
# relation holds), so `verify` can cite instances by name.  The raw-cell
# versions below are also used by the enumeration module on bare tuples.

def _fails_III_i(h, n):
    return [
        (a, b, c, d)
        for a, b, c, d in itertools.product(range(n), repeat=4)
        if h[a][b][h[b][c][d]] != h[a][h[a][b][c]][h[h[a][b][c]][c][d]]
    ]


def _fails_III_ii(h, n):
    return [
        (a, b, c, d)
        for a, b, c, d in itertools.product(range(n), repeat=4)
        if h[h[a][b][c]][c][d] != h[h[a][b][h[b][c][d]]][h[b][c][d]][d]
    ]


def _fails_vII(v, n):
    return [
        (a, b, c)
        for a, b, c in itertools.product(range(n), repeat=3)
        if v[a][v[a][b][c]][c] != b
    ]


def _fails_vIII_i(v, n):
    return [
        (a, b, c, d)
        for a, b, c, d in itertools.product(range(n), repeat=4)
        if v[a][b][v[b][c][d]] != v[a][v[a][b][c]][v[v[a][b][c]][c][d]]
    ]


def _fails_vIII_ii(v, n):
    return [
        (a, b, c, d)
        for a, b, c, d in itertools.product(range(n), repeat=4)
        if v[v[a][b][c]][c][d] != v[v[a][b][v[b][c][d]]][v[b][c][d]][d]
    ]


def _fails_m_i(h, v, n):
    out = []
    for a, b, c, d in itertools.product(range(n), repeat=4):
        y = v[b][c][d]
        if h[v[a][b][c]][c][d] != v[h[a][b][y]][y][d]:
            out.append((a, b, c, d))
    return out


def _fails_m_ii(h, v, n):
    out = []
    for a, b, c, d in itertools.product(range(n), repeat=4):
        x = v[a][b][c]
        if h[a][b][v[b][c][d]] != v[a][x][h[x][c][d]]:
            out.append((a, b, c, d))
    return out


def _fails_R4(h, p, n, matched):
    # [a, ba, b] = ab on defined cells; matched additionally requires the
    # domain to be symmetric (ab defined iff ba defined).
    out = []
    for a, b in itertools.product(range(n), repeat=2):
        ab, ba = p[a][b], p[b][a]
        if matched and (ab is None) != (ba is None):
            out.append((a, b))
        elif ab is not None and ba is not None and h[a][ba][b] != ab:
            out.append((a, b))
    return out


def _fails_R5_1(t, p, n, matched):
    # a[a,b,c] = [a,b,bc]
    out = []
    for a, b, c in itertools.product(range(n), repeat=3):
        x = t[a][b][c]
        bc, ax = p[b][c], p[a][x]
        if matched and (bc is None) != (ax is None):
            out.append((a, b, c))
        elif bc is not None and ax is not None and ax != t[a][b][bc]:
            out.append((a, b, c))
    return out


def _fails_R5_2(t, p, n):
    # [a,b,c] = [[a,b,bc],bc,c]
    out = []
    for a, b, c in itertools.product(range(n), repeat=3):
        bc = p[b][c]
        if bc is not None and t[t[a][b][bc]][bc][c] != t[a][b][c]:
            out.append((a, b, c))
    return out


def _fails_R5_3(t, p, n, matched):
    # [a,b,c]c = [ab,b,c]
    out = []
    for a, b, c in itertools.product(range(n), repeat=3):
        x = t[a][b][c]
        ab, xc = p[a][b], p[x][c]
        if matched and (ab is None) != (xc is None):
            out.append((a, b, c))
        elif ab is not None and xc is not None and xc != t[ab][b][c]:
            out.append((a, b, c))
    return out


def _fails_R5_4(t, p, n):
    # [a,b,c] = [a,ab,[ab,b,c]]
    out = []
    for a, b, c in itertools.product(range(n), repeat=3):
        ab = p[a][b]
        if ab is not None and t[a][ab][t[ab][b][c]] != t[a][b][c]:
            out.append((a, b, c))
    return out


TRIBRACKET_AXIOMS = ("III.i", "III.ii", "vII", "vIII.i", "vIII.ii", "m.i", "m.ii")
PRODUCT_AXIOMS_STANDARD = ("R4", "R5.1", "R5.2", "R5.3", "R5.4", "vR5.2", "vR5.4")
PRODUCT_AXIOMS_EXTENDED = PRODUCT_AXIOMS_STANDARD + ("vR5.1", "vR5.3")


def failing_tribracket_axioms(h: TernaryTable, v: TernaryTable) -> dict:
    """Map axiom name -> failing instances for the pure tribracket relations."""
    n = h.n
    hc, vc = h.cells, v.cells
    out = {}
    if not is_latin_cube(h):
        out["latin-horizontal"] = [()]
    if not is_latin_cube(v):
        out["latin-vertical"] = [()]
    if out:  # line violations make the solve-based relations meaningless
        return out
    checks = {
        "III.i": _fails_III_i(hc, n),
        "III.ii": _fails_III_ii(hc, n),
        "vII": _fails_vII(vc, n),
        "vIII.i": _fails_vIII_i(vc, n),
        "vIII.ii": _fails_vIII_ii(vc, n),
        "m.i": _fails_m_i(hc, vc, n),
        "m.ii": _fails_m_ii(hc, vc, n),
    }
    return {name: bad for name, bad in checks.items() if bad}


def failing_product_axioms(
    h: TernaryTable,
    v: TernaryTable,
    p: PartialProduct,
    variant: str = "vacuous",
    axioms: str = "standard",
) -> dict:
    """Map axiom name -> failing instances for the product relations."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if axioms not in AXIOM_SETS:
        raise ValueError(f"unknown axiom set {axioms!r}")
    n = h.n
    hc, vc, pc = h.cells, v.cells, p.cells
    matched = variant == "matched"
    out = {}
    if not is_partial_latin_square(p):
        out["partial-latin-product"] = [()]
        return out
    checks = {
        "R4": _fails_R4(hc, pc, n, matched),
        "R5.1": _fails_R5_1(hc, pc, n, matched),
        "R5.2": _fails_R5_2(hc, pc, n),
        "R5.3": _fails_R5_3(hc, pc, n, matched),
        "R5.4": _fails_R5_4(hc, pc, n),
        "vR5.2": _fails_R5_2(vc, pc, n),
        "vR5.4": _fails_R5_4(vc, pc, n),
    }
    if axioms == "extended":
        checks["vR5.1"] = _fails_R5_1(vc, pc, n, matched)
        checks["vR5.3"] = _fails_R5_3(vc, pc, n, matched)
    for name, bad in checks.items():
        if bad:
            out[name] = bad
    return out


def check_horizontal(t: TernaryTable) -> bool:
    """III.i and III.ii hold (caller guarantees the Latin-cube property)."""
    return not _fails_III_i(t.cells, t.n) and not _fails_III_ii(t.cells, t.n)


def check_vertical(t: TernaryTable) -> bool:
    """vII, vIII.i and vIII.ii hold."""
    c, n = t.cells, t.n
    return (
        not _fails_vII(c, n)
        and not _fails_vIII_i(c, n)
        and not _fails_vIII_ii(c, n)
    )


def check_mixed(h: TernaryTable, v: TernaryTable) -> bool:
    """m.i and m.ii hold for the pair."""
    if h.n != v.n:
        raise ValueError("tables have different carrier sizes")
    return not _fails_m_i(h.cells, v.cells, h.n) and not _fails_m_ii(
        h.cells, v.cells, h.n
    )


def check_product_classical(
    h: TernaryTable, p: PartialProduct, variant: str = "vacuous"
) -> bool:
    """R4 and R5.1-R5.4 against the horizontal table."""
    n, hc, pc = h.n, h.cells, p.cells
    matched = variant == "matched"
    return (
        not _fails_R4(hc, pc, n, matched)
        and not _fails_R5_1(hc, pc, n, matched)
        and not _fails_R5_2(hc, pc, n)
        and not _fails_R5_3(hc, pc, n, matched)
        and not _fails_R5_4(hc, pc, n)
    )


def check_product_virtual(
    v: TernaryTable,
    p: PartialProduct,
    variant: str = "vacuous",
    axioms: str = "standard",
) -> bool:
    """vR5 relations against the vertical table (vR5.1/vR5.3 only if extended)."""
    n, vc, pc = v.n, v.cells, p.cells
    matched = variant == "matched"
    ok = not _fails_R5_2(vc, pc, n) and not _fails_R5_4(vc, pc, n)
    if ok and axioms == "extended":
        ok = not _fails_R5_1(vc, pc, n, matched) and not _fails_R5_3(
            vc, pc, n, matched
        )
    return ok


def failing_axioms(
    alg: VirtualNAlgebra, variant: str = "vacuous", axioms: str = "standard"
) -> dict:
    """All failing axioms of the full structure, keyed by citable name."""
    out = dict(failing_tribracket_axioms(alg.horizontal, alg.vertical))
    out.update(
        failing_product_axioms(
            alg.horizontal, alg.vertical, alg.product, variant, axioms
        )
    )
    return out


def is_virtual_tribracket(tb: VirtualTribracket) -> bool:
    return not failing_tribracket_axioms(tb.horizontal, tb.vertical)


def is_virtual_nalgebra(
    alg: VirtualNAlgebra, variant: str = "vacuous", axioms: str = "standard"
) -> bool:
    return not failing_axioms(alg, variant, axioms)


# ---------------------------------------------------------------------------
# solving

ROLES3 = ("a", "b", "c", "d")


def solve_ternary(t: TernaryTable, missing_role: str, known: Sequence[int]) -> int:
    """Unique completion of [a,b,c]=d given the other three (0-based).

    ``known`` lists the known symbols in role order with the missing one
    skipped, e.g. missing 'b' takes (a, c, d).
    """
    n, cells = t.n, t.cells
    if missing_role == "d":
        a, b, c = known
        return cells[a][b][c]
    if missing_role == "c":
        a, b, d = known
        row = cells[a][b]
        return row.index(d)
    if missing_role == "b":
        a, c, d = known
        mat = cells[a]
        for b in range(n):
            if mat[b][c] == d:
                return b
        raise ValueError("no completion; table is not a Latin cube")
    if missing_role == "a":
        b, c, d = known
        for a in range(n):
            if cells[a][b][c] == d:
                return a
        raise ValueError("no completion; table is not a Latin cube")
    raise ValueError(f"unknown role {missing_role!r}")


def solve_product(
    p: PartialProduct, missing_role: str, known: Sequence[int]
) -> Optional[int]:
    """Unique defined completion of ab=c, or None when no defined cell fits."""
    n, cells = p.n, p.cells
    if missing_role == "c":
        a, b = known
        return cells[a][b]
    if missing_role == "b":
        a, c = known
        hits = [b for b in range(n) if cells[a][b] == c]
    elif missing_role == "a":
        b, c = known
        hits = [a for a in range(n) if cells[a][b] == c]
    else:
        raise ValueError(f"unknown role {missing_role!r}")
    if len(hits) > 1:
        raise ValueError("ambiguous completion; product is not partial Latin")
    return hits[0] if hits else None


def relabel(alg: VirtualNAlgebra, sigma: Sequence[int]) -> VirtualNAlgebra:
    """Conjugate every table by the symbol permutation sigma (0-based)."""
    n = alg.n
    inv = [0] * n
    for i, s in enumerate(sigma):
        inv[s] = i

    def conj3(cells):
        return tuple(
            tuple(
                tuple(sigma[cells[inv[a]][inv[b]][inv[c]]] for c in range(n))
                for b in range(n)
            )
            for a in range(n)
        )

    def conj2(cells):
        return tuple(
            tuple(
                None
                if cells[inv[a]][inv[b]] is None
                else sigma[cells[inv[a]][inv[b]]]
                for b in range(n)
            )
            for a in range(n)
        )

    return VirtualNAlgebra(
        VirtualTribracket(
            TernaryTable(n, conj3(alg.horizontal.cells)),
            TernaryTable(n, conj3(alg.vertical.cells)),
        ),
        PartialProduct(n, conj2(alg.product.cells)),
    )


# ---------------------------------------------------------------------------
# file format: {"n": int, "horizontal": [[[int]]], "vertical": ..., "product":
# [[int|null]]}, 1-based symbols; vertical/product may be omitted.

def algebra_to_json(obj) -> dict:
    if isinstance(obj, TernaryTable):
        return {"n": obj.n, "horizontal": obj.to_rows()}
    if isinstance(obj, VirtualTribracket):
        return {
            "n": obj.n,
            "horizontal": obj.horizontal.to_rows(),
            "vertical": obj.vertical.to_rows(),
        }
    if isinstance(obj, VirtualNAlgebra):
        return {
            "n": obj.n,
            "horizontal": obj.horizontal.to_rows(),
            "vertical": obj.vertical.to_rows(),
            "product": obj.product.to_rows(),
        }
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def algebra_from_json(data: dict):
    """Parse a table/tribracket/algebra file object; shape drives the type."""
    try:
        n = int(data["n"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError("algebra file needs an integer field 'n'") from exc
    if "horizontal" not in data:
        raise ValueError("algebra file needs a 'horizontal' table")
    h = TernaryTable.from_rows(data["horizontal"])
    if h.n != n:
        raise ValueError("field 'n' disagrees with the horizontal table shape")
    if "vertical" not in data:
        return h
    v = TernaryTable.from_rows(data["vertical"])
    tb = VirtualTribracket(h, v)
    if "product" not in data:
        return tb
    return VirtualNAlgebra(tb, PartialProduct.from_rows(data["product"]))


def load_algebra(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    return algebra_from_json(data)


def save_algebra(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(algebra_to_json(obj), fh)
        fh.write("\n")


# ---------------------------------------------------------------------------
# bundled example algebras

_N3_BRACKET = [
    [[1, 2, 3], [3, 1, 2], [2, 3, 1]],
    [[2, 3, 1], [1, 2, 3], [3, 1, 2]],
    [[3, 1, 2], [2, 3, 1], [1, 2, 3]],
]
_N3_PRODUCT = [[1, 3, 2], [3, 2, 1], [2, 1, 3]]

_N4_HORIZONTAL = [
    [[1, 2, 3, 4], [2, 1, 4, 3], [3, 4, 1, 2], [4, 3, 2, 1]],
    [[2, 1, 4, 3], [1, 2, 3, 4], [4, 3, 2, 1], [3, 4, 1, 2]],
    [[3, 4, 1, 2], [4, 3, 2, 1], [1, 2, 3, 4], [2, 1, 4, 3]],
    [[4, 3, 2, 1], [3, 4, 1, 2], [2, 1, 4, 3], [1, 2, 3, 4]],
]
_N4_VERTICAL = [
    [[1, 2, 3, 4], [4, 1, 2, 3], [3, 4, 1, 2], [2, 3, 4, 1]],
    [[2, 3, 4, 1], [1, 2, 3, 4], [4, 1, 2, 3], [3, 4, 1, 2]],
    [[3, 4, 1, 2], [2, 3, 4, 1], [1, 2, 3, 4], [4, 1, 2, 3]],
    [[4, 1, 2, 3], [3, 4, 1, 2], [2, 3, 4, 1], [1, 2, 3, 4]],
]
_N4_PRODUCT = [
    [3, None, None, 1],
    [None, 4, None, 3],
    [None, None, 1, 4],
    [4, 1, 3, 2],
]


def algebra_n3() -> VirtualNAlgebra:
    """Bundled size-3 algebra: both brackets a-b+c mod 3, product -(a+b)."""
    h = TernaryTable.from_rows(_N3_BRACKET)
    v = TernaryTable.from_rows(_N3_BRACKET)
    return VirtualNAlgebra(
        VirtualTribracket(h, v), PartialProduct.from_rows(_N3_PRODUCT)
    )


def algebra_n4() -> VirtualNAlgebra:
    """Bundled size-4 algebra: Klein-group bracket, cyclic vertical bracket,
    and a 10-cell partial product."""
    h = TernaryTable.from_rows(_N4_HORIZONTAL)
    v = TernaryTable.from_rows(_N4_VERTICAL)
    return VirtualNAlgebra(
        VirtualTribracket(h, v), PartialProduct.from_rows(_N4_PRODUCT)
    )
