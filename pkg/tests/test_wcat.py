"""Tests for lattices and their cubical path complexes.

Shape expectations for the three hand lattices (a single arrow, a
two-arrow interval, a three-arrow square) are worked out by hand from the
gluing rule; the randomized suite leans on the rational homology oracle
plus an explicit collapse matching.
"""

import random

import pytest

from ratmodels.dg import HomologyClass
from ratmodels.wcat import (Cell, CubicalComplex, HigherOperationValue,
                            Lattice, LatticeError, basis_complex, chains,
                            concatenate, cone_check, random_lattice,
                            w_complex)


def single_arrow():
    return Lattice(["s", "t"], "s", "t", [("phi", "s", "t")])


def interval():
    return Lattice(["s", "m", "t"], "s", "t",
                   [("f", "s", "m"), ("g", "m", "t"), ("phi", "s", "t")],
                   {("f", "g"): "phi"})


def square():
    return Lattice(
        ["s", "m1", "m2", "t"], "s", "t",
        [("f1", "s", "m1"), ("f2", "m1", "m2"), ("f3", "m2", "t"),
         ("f12", "s", "m2"), ("f23", "m1", "t"), ("phi", "s", "t")],
        {("f1", "f2"): "f12", ("f2", "f3"): "f23",
         ("f1", "f23"): "phi", ("f12", "f3"): "phi"})


# ----------------------------------------------------------------- validity

def test_rejects_cycles():
    with pytest.raises(LatticeError, match="cycle"):
        Lattice(["s", "a", "t"], "s", "t",
                [("phi", "s", "t"), ("f", "s", "a"), ("g", "a", "s")])


def test_rejects_loops_and_unknown_endpoints():
    with pytest.raises(LatticeError, match="loop"):
        Lattice(["s", "t"], "s", "t", [("phi", "s", "t"), ("e", "t", "t")])
    with pytest.raises(LatticeError, match="unknown endpoint"):
        Lattice(["s", "t"], "s", "t", [("phi", "s", "q")])


def test_rejects_missing_composite():
    with pytest.raises(LatticeError, match="missing composite"):
        Lattice(["s", "m", "t"], "s", "t",
                [("f", "s", "m"), ("g", "m", "t"), ("phi", "s", "t")])


def test_rejects_nonassociative_table():
    with pytest.raises(LatticeError, match="not associative"):
        Lattice(
            ["s", "a", "b", "t"], "s", "t",
            [("f", "s", "a"), ("g", "a", "b"), ("h", "b", "t"),
             ("fg", "s", "b"), ("gh", "a", "t"),
             ("phi", "s", "t"), ("psi", "s", "t")],
            {("f", "g"): "fg", ("g", "h"): "gh",
             ("fg", "h"): "phi", ("f", "gh"): "psi"})


def test_requires_unique_maximal_arrow():
    with pytest.raises(LatticeError, match="exactly one arrow"):
        Lattice(["s", "t"], "s", "t",
                [("phi", "s", "t"), ("psi", "s", "t")])
    with pytest.raises(LatticeError, match="exactly one arrow"):
        Lattice(["s", "t"], "s", "t", [])


def test_requires_arrows_through_every_object():
    with pytest.raises(LatticeError, match="no arrow from s to m"):
        Lattice(["s", "m", "t"], "s", "t",
                [("phi", "s", "t"), ("g", "m", "t")])
    with pytest.raises(LatticeError, match="no arrow from m to t"):
        Lattice(["s", "m", "t"], "s", "t",
                [("phi", "s", "t"), ("f", "s", "m")])


# ------------------------------------------------------------------- chains

def test_chain_enumeration():
    assert chains(single_arrow(), "s", "t", 1) == [("phi",)]
    assert chains(single_arrow(), "s", "t", 2) == []
    assert chains(single_arrow(), "s", "t", 0) == []
    assert chains(interval(), "s", "t", 2) == [("f", "g")]
    assert chains(square(), "s", "t", 3) == [("f1", "f2", "f3")]
    assert len(chains(square(), "s", "t", 2)) == 2


# ---------------------------------------------------------------- complexes

def test_single_arrow_complex():
    W = w_complex(single_arrow(), "s", "t")
    assert W.cell_counts() == {0: 1}
    assert basis_complex(single_arrow()).cell_counts() == {}


def test_interval_complex():
    g = interval()
    W = w_complex(g, "s", "t")
    assert W.cell_counts() == {0: 2, 1: 1}
    assert W.reduced_homology_dims() == [0, 0]
    B = basis_complex(g)
    assert B.cell_counts() == {0: 1}
    assert B.cells(0)[0].display() == "f|g"


def test_square_complex():
    g = square()
    W = w_complex(g, "s", "t")
    assert W.cell_counts() == {0: 4, 1: 4, 2: 1}
    assert W.euler_characteristic() == 1
    assert W.boundary_squares_to_zero()
    assert W.reduced_homology_dims() == [0, 0, 0]
    B = basis_complex(g)
    assert B.cell_counts() == {0: 3, 1: 2}
    assert B.euler_characteristic() == 1
    assert B.boundary_squares_to_zero()
    assert B.reduced_homology_dims() == [0, 0]


def test_cell_counts_match_chain_counts():
    # before any junction is pinned, one k-cube per (k+1)-chain
    g = square()
    W = w_complex(g, "s", "t")
    for dim in range(0, 3):
        free = [c for c in W.cells(dim) if not c.cuts]
        assert len(free) == len(chains(g, "s", "t", dim + 1))


def test_basis_is_a_subcomplex():
    B = basis_complex(square())
    for dim in list(B.cells_by_dim):
        for cell in B.cells(dim):
            for face in B.boundary(cell):
                assert B.has_cell(face)


def test_boundary_requires_closed_cell_set():
    g = interval()
    broken = CubicalComplex(g, [Cell(("f", "g"), frozenset())])
    with pytest.raises(LatticeError, match="escapes"):
        broken.boundary_matrix(1)


# ------------------------------------------------------------ concatenation

def test_concatenation_is_associative_on_cells():
    g = square()
    pieces = [w_complex(g, "s", "m1").cells(0),
              w_complex(g, "m1", "m2").cells(0),
              w_complex(g, "m2", "t").cells(0)]
    for c1 in pieces[0]:
        for c2 in pieces[1]:
            for c3 in pieces[2]:
                left = concatenate(g, concatenate(g, c1, c2), c3)
                right = concatenate(g, c1, concatenate(g, c2, c3))
                assert left == right
                assert left.cuts == frozenset({1, 2})


def test_concatenation_requires_matching_endpoints():
    g = square()
    c1 = w_complex(g, "s", "m1").cells(0)[0]
    with pytest.raises(LatticeError, match="not composable"):
        concatenate(g, c1, c1)


def test_concatenation_lands_in_the_basis():
    g = square()
    for c1 in w_complex(g, "s", "m1").cells(0):
        for c2 in w_complex(g, "m1", "t").cells_by_dim.get(0, []):
            cell = concatenate(g, c1, c2)
            assert basis_complex(g).has_cell(cell)


# --------------------------------------------------------------- cone check

def test_cone_check_hand_lattices():
    for g in (single_arrow(), interval(), square()):
        report = cone_check(g)
        assert report.ok, report.detail
        assert report.critical_cells == [g.phi_max]
        assert report.matching_acyclic
        assert not any(report.homology)


def test_cone_check_random_lattices():
    rng = random.Random(411)
    for _ in range(12):
        g = random_lattice(rng)
        report = cone_check(g)
        assert report.ok, report.detail


def test_random_generator_hits_parallel_arrows():
    rng = random.Random(7)
    doubled = 0
    for _ in range(30):
        g = random_lattice(rng)
        seen = {}
        for a in g.arrows.values():
            seen.setdefault((a.source, a.target), []).append(a.name)
        if any(len(names) > 1 for names in seen.values()):
            doubled += 1
    assert doubled > 0


# ---------------------------------------------------------- operation value

def test_higher_operation_value_vanishing_flag():
    nonzero = HomologyClass("class", 4, (1,))
    zero = HomologyClass("boundary", 4)
    value = HigherOperationValue.from_classes([nonzero])
    assert not value.vanishes
    value = HigherOperationValue.from_classes([nonzero, zero])
    assert value.vanishes
    assert HigherOperationValue.from_classes([]).vanishes is False
