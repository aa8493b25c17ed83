"""Tests for sphere-disk resolutions, half-smashes, the secondary operation
and the acyclicity shadow.

The two seven-generator examples (quadratic and perturbed differential) are
the running fixtures; for them the operation's value, indeterminacy and
vanishing verdict are frozen from the canonical-solution ladder.  The
half-smash boundary tables are pinned to the documented interval/square
conventions, and d*d = 0 is checked structurally across shapes.
"""

from fractions import Fraction

import pytest

from ratmodels.dg import DgPresentation, SphereDisk
from ratmodels.lie import FreeGradedLie, Generator
from ratmodels.resolutions import (
    OperationDatum, OperationUndefinedError, example_resolution_B,
    example_resolution_Bprime, half_smash, homotopy_shadow, jacobi_example,
    jacobi_lie_shadow, jacobi_resolution, jacobi_resolution_checks,
    perturbed_example, quadratic_example, run_corpus, secondary_operation)

IMAGES = {"<a>": "a", "<b>": "b", "<c>": "c"}


@pytest.fixture(scope="module")
def res_b():
    return example_resolution_B(7)


@pytest.fixture(scope="module")
def res_bprime():
    return example_resolution_Bprime(7)


@pytest.fixture(scope="module")
def res_jacobi():
    return jacobi_resolution(7)


# ------------------------------------------------------------- resolutions

def test_bases_are_square_zero():
    for base in (quadratic_example(), perturbed_example(), jacobi_example(),
                 jacobi_lie_shadow()):
        assert base.validate(7).ok


def test_quadratic_resolution_cells_all_attach(res_b):
    assert res_b.check_cells() == []
    assert set(res_b.cells) == {"x0", "x1", "w0", "w1", "y0", "y1", "y2",
                                "z0", "z1", "z2", "z3"}


def test_perturbed_resolution_cells_all_attach(res_bprime):
    assert res_bprime.check_cells() == []


def test_disk_chain_depth_matches_the_generator_degree(res_b):
    # x needs one disk, y two, z three: one per simplicial dimension climbed
    assert res_b.cell_level("x1") == 0
    assert res_b.cell_level("y2") == 0
    assert res_b.cell_level("z0") == 3
    assert res_b.cell_level("z3") == 0


def test_attachment_failure_reports_a_broken_cell(res_b):
    level, good = res_b.cells["y1"]
    res_b.cells["bad"] = (level, 2 * good)
    try:
        message = res_b.attachment_failure("y1")
        assert message is None
        res_b.attachments["bad"] = res_b.attachments["y1"]
        assert res_b.attachment_failure("bad") is not None
    finally:
        del res_b.cells["bad"]
        res_b.attachments.pop("bad", None)


def test_perturbed_y_disk_carries_the_correction(res_bprime):
    display = res_bprime.cells["y1"][1].display()
    assert display == "3*<[<a>,<x>]> - <[<a>,[<b>,<c>]]> - <[[<a>,<c>],<b>]>"


def test_jacobi_identity_report_is_clean():
    report = jacobi_resolution_checks(7)
    assert report.ok, report.failures()
    assert len(report.checks) > 20


def test_lambda_tower_keeps_the_jacobiator(res_jacobi):
    lvl0 = res_jacobi.tower.level(0)
    name = "<[a,[a,a]]>"
    assert name in lvl0.gen_names
    assert lvl0.d_of_gen(name).is_zero()


# ------------------------------------------------------------- half-smash

def test_interval_smash_boundary_table():
    model = half_smash(SphereDisk("sphere", 3, "x"), 1)
    p = model.presentation
    assert p.d_of_gen("(x,(Id))").display() == "(x,(d0)) - (x,(d1))"
    assert p.d_of_gen("(x,(d0))").is_zero()


def test_square_smash_boundary_table():
    model = half_smash(SphereDisk("sphere", 3, "y"), 2)
    p = model.presentation
    assert p.d_of_gen("(y,(Id))").display() == "-(y,(d0)) + (y,(d1)) - (y,(d2))"
    assert p.d_of_gen("(y,(d0))").display() == "-(y,(d0d1)) + (y,(d0d2))"
    assert p.d_of_gen("(y,(d1))").display() == "-(y,(d0d1)) + (y,(d1d2))"
    assert p.d_of_gen("(y,(d2))").display() == "-(y,(d0d2)) + (y,(d1d2))"


def test_disk_smash_tracks_the_disk_boundary():
    model = half_smash(SphereDisk("disk", 4, "u", "v"), 1)
    assert model.presentation.d_of_gen("(u,(Id))").display() == \
        "(u,(d0)) - (u,(d1)) - (v,(Id))"


@pytest.mark.parametrize("kind,dim", [("sphere", 2), ("sphere", 3),
                                      ("sphere", 4), ("disk", 3), ("disk", 5)])
@pytest.mark.parametrize("cube", [1, 2])
def test_half_smash_is_square_zero(kind, dim, cube):
    shape = SphereDisk(kind, dim, "g") if kind == "sphere" else \
        SphereDisk(kind, dim, "g", "h")
    model = half_smash(shape, cube)
    assert model.validate(dim + cube + 2).ok


def test_half_smash_accepts_cube_names():
    a = half_smash(SphereDisk("sphere", 2, "x"), "D1")
    b = half_smash(SphereDisk("sphere", 2, "x"), "D[2]")
    assert a.cube == 1 and b.cube == 2
    with pytest.raises(ValueError):
        half_smash(SphereDisk("sphere", 2, "x"), 3)


# ------------------------------------------------------ secondary operation

def test_operation_vanishes_on_the_quadratic_example(res_b):
    value = secondary_operation(quadratic_example(), res_b,
                                OperationDatum("y0", IMAGES), 7)
    assert value.vanishes
    assert value.classes[0].status == "boundary"


def test_operation_detects_the_perturbation(res_bprime):
    target = perturbed_example()
    value = secondary_operation(target, res_bprime,
                                OperationDatum("y0", IMAGES), 7)
    assert not value.vanishes
    L = target.algebra
    witness = 3 * L.gen("a").bracket(L.gen("x"))
    assert value.classes == (target.homology_class_of(witness, 7),)


def test_operation_indeterminacy_is_the_bracket_shift(res_bprime):
    value = secondary_operation(perturbed_example(), res_bprime,
                                OperationDatum("y0", IMAGES), 7)
    assert len(value.indeterminacy) == 1
    assert value.indeterminacy[0].coefficients == (3, 0, 0, 0)


def test_operation_scales_with_the_cell(res_b, res_bprime):
    level, cell = res_b.cells["y0"]
    value = secondary_operation(quadratic_example(), res_b,
                                OperationDatum((level, 2 * cell), IMAGES), 7)
    assert value.vanishes
    level, cell = res_bprime.cells["y0"]
    doubled = secondary_operation(perturbed_example(), res_bprime,
                                  OperationDatum((level, 2 * cell), IMAGES), 7)
    assert not doubled.vanishes
    assert doubled.classes[0].coefficients == (2, 2, 0, 0)


def test_operation_requires_a_closed_cell(res_b):
    tower = res_b.tower
    open_cell = tower.wrap(1, tower.level(0).algebra.gen("<x>"))
    with pytest.raises(ValueError):
        secondary_operation(quadratic_example(), res_b,
                            OperationDatum((1, open_cell), IMAGES), 7)


def test_operation_rejects_non_chain_bottom_maps(res_b):
    with pytest.raises(OperationUndefinedError):
        secondary_operation(quadratic_example(), res_b,
                            OperationDatum("y0", {"<x>": "x"}), 7)


def test_operation_needs_a_lie_target(res_b):
    gens = [Generator("u", 2)]
    dga = DgPresentation("DGA", gens, None)
    with pytest.raises(ValueError):
        secondary_operation(dga, res_b, OperationDatum("y0", {}), 7)


# ------------------------------------------------------- acyclicity shadow

@pytest.mark.parametrize("base_factory", [quadratic_example,
                                          perturbed_example,
                                          jacobi_lie_shadow])
def test_shadow_reproduces_base_homology_and_nothing_else(base_factory):
    report = homotopy_shadow(base_factory(), internal_cap=3, depth=2)
    assert report.ok, (report.pi0, report.higher)


def test_shadow_extended_degree_probe():
    report = homotopy_shadow(quadratic_example(), internal_cap=4, depth=1)
    assert report.ok
    assert report.pi0 == {1: 2, 2: 3, 3: 3, 4: 4}


# ------------------------------------------------------------------ corpus

def test_corpus_step_subset_runs_clean():
    report = run_corpus(7, steps=[4])
    assert report.ok
    assert all(entry.step == 4 for entry in report.entries)


def test_corpus_summary_flags_failures():
    report = run_corpus(7, steps=[5])
    line = report.summary().splitlines()[0]
    assert line.startswith("ok")
