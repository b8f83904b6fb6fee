"""Exhaustive enumeration of Latin squares/cubes, tribrackets, and algebras.

All catalogs are produced in canonical order (lexicographic by flattened
0-based cells) and are deterministic across runs and worker counts.  The
n=4 cube searches use a layered construction (stack compatible Latin
squares) plus numpy-vectorized relation filters; everything is cross-checked
against plain cell-by-cell backtracking in the test suite.
"""
from __future__ import annotations

import itertools
import json
import multiprocessing
from dataclasses import dataclass, field, asdict
from typing import Iterable, Optional, Sequence

import numpy as np

from .algebra import (
    PartialProduct,
    TernaryTable,
    VirtualNAlgebra,
    VirtualTribracket,
)

MAX_SQUARE_N = 5
MAX_CUBE_N = 4

TARGETS = (
    "LATIN_SQUARE",
    "LATIN_CUBE",
    "HORIZONTAL",
    "VERTICAL",
    "VIRTUAL_TRIBRACKET",
    "VNALGEBRA",
)


class LimitExceeded(ValueError):
    """Carrier size outside the supported search range."""


@dataclass(frozen=True)
class SearchSpec:
    n: int
    target: str
    holes: Optional[int] = None
    pair_domain: str = "PREFILTERED"
    partiality_variant: str = "vacuous"
    axiom_set: str = "standard"

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ValueError(f"unknown target {self.target!r}")
        if self.holes is not None and self.holes > self.n * self.n:
            raise ValueError("holes exceed the product table size")


@dataclass(frozen=True)
class Catalog:
    spec: SearchSpec
    entries: tuple

    @property
    def count(self) -> int:
        return len(self.entries)


# ---------------------------------------------------------------------------
# Latin squares

def _square_rows(n: int, prefix_rows=()) -> list:
    """All n x n Latin squares (tuples of row tuples), lexicographic."""
    perms = list(itertools.permutations(range(n)))
    out = []
    rows = list(prefix_rows)
    colmask = [0] * n
    for row in rows:
        for j, x in enumerate(row):
            colmask[j] |= 1 << x

    def rec(i):
        if i == n:
            out.append(tuple(rows))
            return
        for perm in perms:
            if all(not (colmask[j] >> perm[j]) & 1 for j in range(n)):
                rows.append(perm)
                for j in range(n):
                    colmask[j] |= 1 << perm[j]
                rec(i + 1)
                rows.pop()
                for j in range(n):
                    colmask[j] &= ~(1 << perm[j])

    rec(len(rows))
    return out


def enumerate_latin_squares(n: int, limit: int = MAX_SQUARE_N) -> Catalog:
    if not 1 <= n <= limit:
        raise LimitExceeded(f"Latin-square enumeration supports 1 <= n <= {limit}")
    spec = SearchSpec(n=n, target="LATIN_SQUARE")
    return Catalog(spec, tuple(_square_rows(n)))


# ---------------------------------------------------------------------------
# Latin cubes

def _cubes_backtracking(n: int, prefix: Sequence[int] = ()) -> list:
    """Cell-by-cell enumeration in lex (a,b,c) order; the reference path.

    ``prefix`` pins the first len(prefix) cells (flattened order), which is
    how the search space is sharded.
    """
    cells = [(a, b, c) for a in range(n) for b in range(n) for c in range(n)]
    cube = [[[None] * n for _ in range(n)] for _ in range(n)]
    row = [[0] * n for _ in range(n)]   # mask over (a,b)
    col = [[0] * n for _ in range(n)]   # mask over (a,c)
    pil = [[0] * n for _ in range(n)]   # mask over (b,c)
    out = []

    def place(i, y):
        a, b, c = cells[i]
        cube[a][b][c] = y
        row[a][b] |= 1 << y
        col[a][c] |= 1 << y
        pil[b][c] |= 1 << y

    def unplace(i, y):
        a, b, c = cells[i]
        cube[a][b][c] = None
        row[a][b] &= ~(1 << y)
        col[a][c] &= ~(1 << y)
        pil[b][c] &= ~(1 << y)

    def rec(i):
        if i == n ** 3:
            out.append(tuple(tuple(tuple(r) for r in mat) for mat in cube))
            return
        a, b, c = cells[i]
        used = row[a][b] | col[a][c] | pil[b][c]
        for y in range(n):
            if not (used >> y) & 1:
                place(i, y)
                rec(i + 1)
                unplace(i, y)

    ok = True
    for i, y in enumerate(prefix):
        a, b, c = cells[i]
        used = row[a][b] | col[a][c] | pil[b][c]
        if (used >> y) & 1:
            ok = False
            break
        place(i, y)
    if ok:
        rec(len(prefix))
    return out


def _cubes_layered(n: int) -> list:
    """Stack disjoint Latin squares; the last layer is forced cell-wise."""
    squares = _square_rows(n)
    m = len(squares)
    flat = np.array(squares, dtype=np.int8).reshape(m, n * n)
    disjoint = (flat[:, None, :] != flat[None, :, :]).all(axis=2)
    sqset = set(squares)
    total = n * (n - 1) // 2 * 2 + (n - 1) * n // 2 * 0  # unused guard
    full_sum = n * (n - 1) // 2
    out = []

    def rec(layers, cand):
        if len(layers) == n - 1:
            last = tuple(
                tuple(
                    full_sum * 2 // (n - 1) * 0
                    + (n * (n - 1) // 2 - sum(lay[r][c] for lay in layers))
                    for c in range(n)
                )
                for r in range(n)
            )
            if last in sqset:
                out.append(tuple(layers) + (last,))
            return
        for j in np.nonzero(cand)[0]:
            rec(layers + [squares[j]], cand & disjoint[j])

    if n == 1:
        return [(((0,),),)]
    for i in range(m):
        rec([squares[i]], disjoint[i])
    return out


def latin_cubes_raw(n: int, limit: int = MAX_CUBE_N) -> list:
    if not 1 <= n <= limit:
        raise LimitExceeded(f"Latin-cube enumeration supports 1 <= n <= {limit}")
    if n >= 4:
        return _cubes_layered(n)
    return _cubes_backtracking(n)


def enumerate_latin_cubes(n: int, limit: int = MAX_CUBE_N) -> Catalog:
    spec = SearchSpec(n=n, target="LATIN_CUBE")
    return Catalog(spec, tuple(latin_cubes_raw(n, limit)))


# ---------------------------------------------------------------------------
# vectorized relation filters over a stack of cubes

def _gather(flat, n, ia, ib, ic):
    return np.take_along_axis(flat, ia * n * n + ib * n + ic, axis=1)


def _filter_horizontal(stack: np.ndarray, n: int) -> np.ndarray:
    m = stack.shape[0]
    flat = stack.reshape(m, -1)
    idx = [x.ravel() for x in np.indices((n, n, n, n))]
    A, B, C, D = (np.broadcast_to(x, (m, x.size)) for x in idx)
    x = _gather(flat, n, A, B, C)
    y = _gather(flat, n, B, C, D)
    ok1 = (_gather(flat, n, A, B, y)
           == _gather(flat, n, A, x, _gather(flat, n, x, C, D))).all(axis=1)
    ok2 = (_gather(flat, n, x, C, D)
           == _gather(flat, n, _gather(flat, n, A, B, y), y, D)).all(axis=1)
    return ok1 & ok2


def _filter_vertical(stack: np.ndarray, n: int) -> np.ndarray:
    m = stack.shape[0]
    flat = stack.reshape(m, -1)
    idx3 = [np.broadcast_to(x.ravel(), (m, n ** 3)) for x in np.indices((n, n, n))]
    A3, B3, C3 = idx3
    okII = (_gather(flat, n, A3, _gather(flat, n, A3, B3, C3), C3) == B3).all(axis=1)
    idx4 = [np.broadcast_to(x.ravel(), (m, n ** 4)) for x in np.indices((n, n, n, n))]
    A, B, C, D = idx4
    x = _gather(flat, n, A, B, C)
    y = _gather(flat, n, B, C, D)
    ok1 = (_gather(flat, n, A, B, y)
           == _gather(flat, n, A, x, _gather(flat, n, x, C, D))).all(axis=1)
    ok2 = (_gather(flat, n, x, C, D)
           == _gather(flat, n, _gather(flat, n, A, B, y), y, D)).all(axis=1)
    return okII & ok1 & ok2


def _to_tuples(stack: np.ndarray) -> list:
    return [
        tuple(tuple(tuple(int(x) for x in row) for row in mat) for mat in cube)
        for cube in stack
    ]


def enumerate_tribracket_components(
    n: int, which: str, limit: int = MAX_CUBE_N
) -> Catalog:
    """Latin cubes satisfying the horizontal (III) or vertical (vII/vIII)
    relations."""
    if which not in ("HORIZONTAL", "VERTICAL"):
        raise ValueError(f"unknown component {which!r}")
    cubes = latin_cubes_raw(n, limit)
    stack = np.array(cubes, dtype=np.int8).reshape(len(cubes), n, n, n)
    mask = _filter_horizontal(stack, n) if which == "HORIZONTAL" else _filter_vertical(stack, n)
    entries = [cubes[i] for i in np.nonzero(mask)[0]]
    return Catalog(SearchSpec(n=n, target=which), tuple(entries))


def _mixed_ok(hf: np.ndarray, vf: np.ndarray, n: int, idx) -> bool:
    A, B, C, D = idx
    vabc = vf[A * n * n + B * n + C]
    vbcd = vf[B * n * n + C * n + D]
    if not np.array_equal(
        hf[vabc * n * n + C * n + D],
        vf[hf[A * n * n + B * n + vbcd] * n * n + vbcd * n + D],
    ):
        return False
    return np.array_equal(
        hf[A * n * n + B * n + vbcd],
        vf[A * n * n + vabc * n + hf[vabc * n * n + C * n + D]],
    )


def enumerate_virtual_tribrackets(
    n: int, pair_domain: str = "PREFILTERED", limit: int = MAX_CUBE_N
) -> Catalog:
    """All pairs (horizontal, vertical) satisfying the full relation set.

    PREFILTERED draws candidates from the component catalogs; ALL_CUBES runs
    the complete per-pair check over raw cube pairs.  The results coincide.
    """
    if pair_domain not in ("PREFILTERED", "ALL_CUBES"):
        raise ValueError(f"unknown pair domain {pair_domain!r}")
    idx = [x.ravel() for x in np.indices((n, n, n, n))]
    entries = []
    if pair_domain == "PREFILTERED":
        hs = enumerate_tribracket_components(n, "HORIZONTAL", limit).entries
        vs = enumerate_tribracket_components(n, "VERTICAL", limit).entries
        hflat = [np.array(h, dtype=np.int64).ravel() for h in hs]
        vflat = [np.array(v, dtype=np.int64).ravel() for v in vs]
        for i, h in enumerate(hs):
            for j, v in enumerate(vs):
                if _mixed_ok(hflat[i], vflat[j], n, idx):
                    entries.append((h, v))
    else:
        cubes = latin_cubes_raw(n, limit)
        stack = np.array(cubes, dtype=np.int8).reshape(len(cubes), n, n, n)
        okh = _filter_horizontal(stack, n)
        okv = _filter_vertical(stack, n)
        flat = [np.array(c, dtype=np.int64).ravel() for c in cubes]
        for i, h in enumerate(cubes):
            if not okh[i]:
                continue
            for j, v in enumerate(cubes):
                if not okv[j]:
                    continue
                if _mixed_ok(flat[i], flat[j], n, idx):
                    entries.append((h, v))
    spec = SearchSpec(n=n, target="VIRTUAL_TRIBRACKET", pair_domain=pair_domain)
    return Catalog(spec, tuple(entries))


# ---------------------------------------------------------------------------
# partial-product search over a tribracket pair

def _product_search(h, v, n, holes, variant, axiom_set, prefix=()):
    """All partial products with exactly ``holes`` undefined cells satisfying
    the product relations; constraint-propagating backtracking.

    Cells are filled in lex (a,b) order, symbols ascending, the hole branch
    last.  Unary consequences of R5.2/R5.4/vR5.2/vR5.4 prefill per-cell
    domains; the remaining relations are checked as soon as every product
    cell they mention is decided.
    """
    matched = variant == "matched"
    extended = axiom_set == "extended"

    allowed = [[[] for _ in range(n)] for _ in range(n)]
    for a, b in itertools.product(range(n), repeat=2):
        for y in range(n):
            ok = True
            for c in range(n):
                if h[a][y][h[y][b][c]] != h[a][b][c]:  # R5.4 with ab=y
                    ok = False
                    break
                if v[a][y][v[y][b][c]] != v[a][b][c]:  # vR5.4
                    ok = False
                    break
            if ok:
                for z in range(n):
                    if h[h[z][a][y]][y][b] != h[z][a][b]:  # R5.2 with bc=y
                        ok = False
                        break
                    if v[v[z][a][y]][y][b] != v[z][a][b]:  # vR5.2
                        ok = False
                        break
            if ok:
                allowed[a][b].append(y)

    cells = [(a, b) for a in range(n) for b in range(n)]
    index = {cell: i for i, cell in enumerate(cells)}
    grid = [[None] * n for _ in range(n)]
    decided = [False] * (n * n)
    watch = [[] for _ in range(n * n)]

    def add(kind, tab, data, c1, c2):
        i1, i2 = index[c1], index[c2]
        watch[i1].append((kind, tab, data, i2))
        if i2 != i1:
            watch[i2].append((kind, tab, data, i1))

    for a, b, c in itertools.product(range(n), repeat=3):
        x = h[a][b][c]
        add("51", h, (a, b, c, x), (b, c), (a, x))
        add("53", h, (a, b, c, x), (a, b), (x, c))
        if extended:
            y = v[a][b][c]
            add("51", v, (a, b, c, y), (b, c), (a, y))
            add("53", v, (a, b, c, y), (a, b), (y, c))
    for a, b in itertools.product(range(n), repeat=2):
        add("R4", h, (a, b), (a, b), (b, a))

    def holds(kind, tab, data):
        if kind == "R4":
            a, b = data
            ab, ba = grid[a][b], grid[b][a]
            if matched and (ab is None) != (ba is None):
                return False
            return ab is None or ba is None or tab[a][ba][b] == ab
        a, b, c, t = data
        if kind == "51":
            bc, at = grid[b][c], grid[a][t]
            if matched and (bc is None) != (at is None):
                return False
            return bc is None or at is None or at == tab[a][b][bc]
        ab, tc = grid[a][b], grid[t][c]
        if matched and (ab is None) != (tc is None):
            return False
        return ab is None or tc is None or tc == tab[ab][b][c]

    out = []
    row_used = [0] * n
    col_used = [0] * n
    total = n * n

    def options(i):
        a, b = cells[i]
        opts = [
            y
            for y in allowed[a][b]
            if not (row_used[a] >> y) & 1 and not (col_used[b] >> y) & 1
        ]
        opts.append(None)
        return opts

    def place(i, y):
        a, b = cells[i]
        grid[a][b] = y
        decided[i] = True
        if y is not None:
            row_used[a] |= 1 << y
            col_used[b] |= 1 << y

    def unplace(i, y):
        a, b = cells[i]
        grid[a][b] = None
        decided[i] = False
        if y is not None:
            row_used[a] &= ~(1 << y)
            col_used[b] &= ~(1 << y)

    def consistent(i):
        for kind, tab, data, other in watch[i]:
            if (other <= i or decided[other]) and not holds(kind, tab, data):
                return False
        return True

    def rec(i, nholes):
        if i == total:
            out.append(tuple(tuple(r) for r in grid))
            return
        remaining = total - i - 1
        for y in options(i):
            nh = nholes + (1 if y is None else 0)
            if nh > holes or nh + remaining < holes:
                continue
            place(i, y)
            if consistent(i):
                rec(i + 1, nh)
            unplace(i, y)

    ok = True
    nholes = 0
    for i, y in enumerate(prefix):
        if y is not None and (
            y not in allowed[cells[i][0]][cells[i][1]]
            or (row_used[cells[i][0]] >> y) & 1
            or (col_used[cells[i][1]] >> y) & 1
        ):
            ok = False
            break
        place(i, y)
        nholes += 1 if y is None else 0
        if not consistent(i):
            ok = False
            break
    if ok:
        rec(len(prefix), nholes)
    return out


def _vnalg_worker(args):
    h, v, n, holes, variant, axiom_set = args
    return [(h, v, p) for p in _product_search(h, v, n, holes, variant, axiom_set)]


def search_vnalgebras(
    n: int,
    holes: int,
    variant: str = "vacuous",
    axiom_set: str = "standard",
    jobs: int = 1,
    limit: int = MAX_CUBE_N,
) -> Catalog:
    """All algebras whose product has exactly ``holes`` undefined cells."""
    if holes > n * n:
        raise LimitExceeded("hole count exceeds the product table")
    tribrackets = enumerate_virtual_tribrackets(n, "PREFILTERED", limit)
    tasks = [
        (h, v, n, holes, variant, axiom_set) for (h, v) in tribrackets.entries
    ]
    if jobs > 1 and len(tasks) > 1:
        with multiprocessing.Pool(jobs) as pool:
            chunks = pool.map(_vnalg_worker, tasks, chunksize=8)
    else:
        chunks = [_vnalg_worker(t) for t in tasks]
    entries = [entry for chunk in chunks for entry in chunk]
    spec = SearchSpec(
        n=n,
        target="VNALGEBRA",
        holes=holes,
        partiality_variant=variant,
        axiom_set=axiom_set,
    )
    return Catalog(spec, tuple(entries))


# ---------------------------------------------------------------------------
# catalog serialization (JSON lines)

def _hole_key(x):
    return -1 if x is None else x


def entry_to_json(spec: SearchSpec, entry) -> dict:
    n = spec.n
    if spec.target == "LATIN_SQUARE":
        return {"n": n, "product": [[x + 1 for x in row] for row in entry]}
    if spec.target in ("LATIN_CUBE", "HORIZONTAL", "VERTICAL"):
        return {"n": n, "horizontal": TernaryTable(n, entry).to_rows()}
    if spec.target == "VIRTUAL_TRIBRACKET":
        h, v = entry
        return {
            "n": n,
            "horizontal": TernaryTable(n, h).to_rows(),
            "vertical": TernaryTable(n, v).to_rows(),
        }
    h, v, p = entry
    return {
        "n": n,
        "horizontal": TernaryTable(n, h).to_rows(),
        "vertical": TernaryTable(n, v).to_rows(),
        "product": PartialProduct(n, p).to_rows(),
    }


def entry_to_algebra(spec: SearchSpec, entry) -> VirtualNAlgebra:
    if spec.target != "VNALGEBRA":
        raise ValueError("only VNALGEBRA entries convert to algebras")
    h, v, p = entry
    n = spec.n
    return VirtualNAlgebra(
        VirtualTribracket(TernaryTable(n, h), TernaryTable(n, v)),
        PartialProduct(n, p),
    )


def catalog_to_jsonl(catalog: Catalog) -> str:
    header = {"spec": asdict(catalog.spec), "count": catalog.count}
    lines = [json.dumps(header, sort_keys=True)]
    for entry in catalog.entries:
        lines.append(json.dumps(entry_to_json(catalog.spec, entry), sort_keys=True))
    return "\n".join(lines) + "\n"


def write_catalog(catalog: Catalog, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(catalog_to_jsonl(catalog))


def read_catalog(path) -> Catalog:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line for line in fh.read().splitlines() if line.strip()]
    if not lines:
        raise ValueError(f"{path}: empty catalog file")
    try:
        header = json.loads(lines[0])
        spec = SearchSpec(**header["spec"])
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ValueError(f"{path}: line 1: bad catalog header ({exc})") from exc
    entries = []
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: line {lineno}: not valid JSON") from exc
        entries.append(_entry_from_json(spec, data, f"{path}: line {lineno}"))
    if header.get("count") != len(entries):
        raise ValueError(f"{path}: header count disagrees with entry lines")
    return Catalog(spec, tuple(entries))


def _entry_from_json(spec: SearchSpec, data: dict, where: str):
    try:
        if spec.target == "LATIN_SQUARE":
            return tuple(tuple(x - 1 for x in row) for row in data["product"])
        if spec.target in ("LATIN_CUBE", "HORIZONTAL", "VERTICAL"):
            return TernaryTable.from_rows(data["horizontal"]).cells
        if spec.target == "VIRTUAL_TRIBRACKET":
            return (
                TernaryTable.from_rows(data["horizontal"]).cells,
                TernaryTable.from_rows(data["vertical"]).cells,
            )
        return (
            TernaryTable.from_rows(data["horizontal"]).cells,
            TernaryTable.from_rows(data["vertical"]).cells,
            PartialProduct.from_rows(data["product"]).cells,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{where}: malformed entry ({exc})") from exc
