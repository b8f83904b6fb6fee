"""Region-coloring invariants of virtual trivalent spatial graph diagrams.

The package enumerates the partial ternary algebras that color such
diagrams (Latin cubes, virtual tribrackets, and tribracket-product
algebras) and computes the coloring-count invariant of diagrams encoded
as planar rotation systems.
"""

from .algebra import (
    PartialProduct,
    TernaryTable,
    VirtualNAlgebra,
    VirtualTribracket,
    algebra_from_json,
    algebra_n3,
    algebra_n4,
    algebra_to_json,
    check_horizontal,
    check_mixed,
    check_product_classical,
    check_product_virtual,
    check_vertical,
    failing_axioms,
    is_latin_cube,
    is_partial_latin_square,
    is_virtual_nalgebra,
    is_virtual_tribracket,
    load_algebra,
    relabel,
    save_algebra,
    solve_product,
    solve_ternary,
)
from .coloring import ColoringCount, brute_force_count, count_colorings, count_tangle_colorings
from .diagram import Diagram, DiagramBuilder, Face, LocalConstraint, Node, load_diagram, save_diagram
from .enumeration import (
    Catalog,
    LimitExceeded,
    SearchSpec,
    enumerate_latin_cubes,
    enumerate_latin_squares,
    enumerate_tribracket_components,
    enumerate_virtual_tribrackets,
    read_catalog,
    search_vnalgebras,
    write_catalog,
)
from .moves import ForbiddenMove, MOVE_NAMES, build_move_tangles, move_pair

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
