"""Tests for differential graded presentations (validate/homology/morphisms).

The headline fixture is the seven-generator Lie model ``B`` whose homology
must reproduce the quotient Lie algebra L(a,b,c)/([a,a], [[c,a],[b,a]]).
The quotient dimensions come from an independent ideal-closure oracle
(`ideal_quotient_dims` below), written before the homology code ran.
"""

import pytest

from ratmodels.dg import (DgMorphism, DgPresentation, SphereDisk, disk,
                          homology, homology_class_of, is_quasi_iso, sphere,
                          validate)
from ratmodels.gca import FreeGca
from ratmodels.lie import FreeGradedLie, Generator
from ratmodels.linalg import SparseMatrix, frac
from ratmodels.nonassoc import NaAlgebra


# --------------------------------------------------------------------- oracle

def ideal_quotient_dims(gens, relator_builders, cap):
    """Dimensions of L(gens)/ideal(relators) per degree.

    Closes the relator span under bracketing with generators (by the Jacobi
    identity that reaches the whole Lie ideal) and subtracts ranks.  This
    never looks at a differential, so it is an independent check on the
    homology pipeline.
    """
    L = FreeGradedLie(gens)
    relators = [build(L) for build in relator_builders]
    ideal = {d: [] for d in range(1, cap + 1)}
    for r in relators:
        ideal[r.degree()].append(r)
    for d in range(1, cap + 1):
        for g in gens:
            lower = d - g.degree
            if lower >= 1:
                for e in ideal[lower]:
                    br = e.bracket(L.gen(g.name))
                    if not br.is_zero():
                        ideal[d].append(br)
    dims = []
    for d in range(1, cap + 1):
        index = {w: i for i, w in enumerate(L.basis(d))}
        cols = [{index[w]: c for w, c in e.terms.items()} for e in ideal[d]]
        rank = SparseMatrix.from_columns(cols, len(index)).rank()
        dims.append(len(index) - rank)
    return dims


QUOTIENT_GENS = [Generator("a", 1), Generator("b", 1), Generator("c", 2)]
QUOTIENT_RELATORS = [
    lambda L: L.gen("a").bracket(L.gen("a")),
    lambda L: L.gen("c").bracket(L.gen("a")).bracket(L.gen("b").bracket(L.gen("a"))),
]


def test_quotient_oracle_frozen_values():
    dims = ideal_quotient_dims(QUOTIENT_GENS, QUOTIENT_RELATORS, 6)
    assert dims == [2, 3, 3, 4, 8, 16]
    # sanity: with no relators the oracle returns free Lie dimensions
    free = ideal_quotient_dims(QUOTIENT_GENS, [], 5)
    assert free == FreeGradedLie(QUOTIENT_GENS).dims(5)


# ------------------------------------------------------------------- fixtures

MODEL_GENS = [Generator("a", 1), Generator("b", 1), Generator("c", 2),
              Generator("x", 3), Generator("y", 5), Generator("w", 6),
              Generator("z", 7)]


def quadratic_model():
    """Lie model with homology L(a,b,c)/([a,a],[[c,a],[b,a]])."""
    L = FreeGradedLie(MODEL_GENS)
    a, b, c, x, y, w, z = (L.gen(n) for n in "abcxywz")
    return DgPresentation("DGL", MODEL_GENS, {
        "x": a.bracket(a),
        "y": 3 * x.bracket(a),
        "w": c.bracket(a).bracket(b.bracket(a)),
        "z": 4 * y.bracket(a) + 3 * x.bracket(x),
    }, algebra=L)


def perturbed_model(last_coeff=-2):
    """Same generators with the lower-order correction terms switched on."""
    L = FreeGradedLie(MODEL_GENS)
    a, b, c, x, y, w, z = (L.gen(n) for n in "abcxywz")
    return DgPresentation("DGL", MODEL_GENS, {
        "x": a.bracket(a),
        "y": 3 * x.bracket(a) - b.bracket(a).bracket(c),
        "w": c.bracket(a).bracket(b.bracket(a)),
        "z": (4 * y.bracket(a) + 3 * x.bracket(x) - 4 * w
              + last_coeff * x.bracket(b).bracket(c)),
    }, algebra=L)


# ------------------------------------------------------------------- validate

def test_quadratic_model_validates_to_cap_8():
    report = validate(quadratic_model(), 8)
    assert report.ok
    assert report.issues == []


def test_wrong_coefficient_is_caught_at_the_first_bad_word():
    L = FreeGradedLie(MODEL_GENS)
    a, b, c, x, y, w, z = (L.gen(n) for n in "abcxywz")
    broken = DgPresentation("DGL", MODEL_GENS, {
        "x": a.bracket(a),
        "y": x.bracket(a),          # coefficient 3 dropped
        "w": c.bracket(a).bracket(b.bracket(a)),
        "z": 4 * y.bracket(a) + 3 * x.bracket(x),
    }, algebra=L)
    report = broken.validate(8)
    assert not report.ok
    issue = report.issues[0]
    assert issue.kind == "d-squared"
    assert issue.where == "z"
    assert issue.degree == 7


def test_degree_mismatch_is_reported_before_d_squared():
    L = FreeGradedLie(MODEL_GENS)
    bad = DgPresentation("DGL", MODEL_GENS, {"x": L.gen("a")}, algebra=L)
    report = bad.validate(4)
    assert not report.ok
    assert report.issues[0].kind == "degree"
    assert report.issues[0].where == "x"


def test_perturbation_coefficient_is_forced_by_d_squared():
    assert validate(perturbed_model(-2), 8).ok
    report = validate(perturbed_model(+2), 8)
    assert not report.ok
    assert report.issues[0].where == "z"


# ------------------------------------------------------------------- homology

def test_homology_matches_ideal_quotient_oracle():
    report = homology(quadratic_model(), 6)
    assert report.dims() == ideal_quotient_dims(QUOTIENT_GENS, QUOTIENT_RELATORS, 6)
    assert report.dims() == [2, 3, 3, 4, 8, 16]


def test_perturbed_model_has_the_same_betti_numbers():
    assert homology(perturbed_model(), 6).dims() == [2, 3, 3, 4, 8, 16]


def test_rank_nullity_bookkeeping():
    p = quadratic_model()
    for degree in range(1, 6):
        data = p._degree_homology(degree)
        chain_dim = len(p.basis(degree))
        assert chain_dim == data.cycle_rank + p.d_matrix(degree).rank()
        assert data.dim == data.cycle_rank - data.boundary_rank
        assert len(data.representatives) == data.dim


def test_representatives_are_canonical_cycles():
    p = quadratic_model()
    for degree in range(1, 5):
        reps = p._degree_homology(degree).representatives
        for i, rep in enumerate(reps):
            assert p.d_element(rep).is_zero()
            cls = p.homology_class_of(rep, cap=degree)
            assert cls.status == "class"
            expected = tuple(frac(1 if j == i else 0) for j in range(len(reps)))
            assert cls.coefficients == expected


def test_boundary_becomes_a_class_after_perturbation():
    p = quadratic_model()
    q = perturbed_model()
    zp = 3 * p.algebra.gen("x").bracket(p.algebra.gen("a"))
    zq = 3 * q.algebra.gen("x").bracket(q.algebra.gen("a"))
    assert p.homology_class_of(zp, cap=4).status == "boundary"
    cls = q.homology_class_of(zq, cap=4)
    assert cls.status == "class"
    assert any(cls.coefficients)


def test_non_cycles_are_flagged():
    q = perturbed_model()
    ya = q.algebra.gen("y").bracket(q.algebra.gen("a"))
    assert q.homology_class_of(ya, cap=6).status == "not-a-cycle"


# --------------------------------------------------------------- sphere, disk

def test_disk_is_acyclic():
    d = disk(4, "u")
    assert validate(d, 5).ok
    assert homology(d, 5).dims() == [0, 0, 0, 0, 0]


def test_sphere_homology_is_one_class():
    s = sphere(3, "x")
    report = homology(s, 5)
    assert report.dims() == [0, 0, 1, 0, 0]
    rep = report.by_degree[3].representatives[0]
    assert rep.display() == "x"


def test_disk_below_dimension_two_is_rejected():
    with pytest.raises(ValueError):
        disk(1)
    sd = SphereDisk("sphere", 2, "s")
    assert sd.presentation().d_of_gen("s").is_zero()


# ------------------------------------------------------------------ morphisms

def rescaled_model():
    """quadratic_model with y scaled out of the coefficients."""
    L = FreeGradedLie(MODEL_GENS)
    a, b, c, x, y, w, z = (L.gen(n) for n in "abcxywz")
    return DgPresentation("DGL", MODEL_GENS, {
        "x": a.bracket(a),
        "y": x.bracket(a),
        "w": c.bracket(a).bracket(b.bracket(a)),
        "z": 12 * y.bracket(a) + 3 * x.bracket(x),
    }, algebra=L)


def test_rescaling_is_a_quasi_isomorphism():
    src = quadratic_model()
    tgt = rescaled_model()
    assert validate(tgt, 8).ok
    values = {n: tgt.algebra.gen(n) for n in "abcxwz"}
    values["y"] = 3 * tgt.algebra.gen("y")
    f = DgMorphism(src, tgt, values)
    assert f.check() == []
    ok, table = is_quasi_iso(f, 5)
    assert ok
    assert all(entry["iso"] for entry in table.values())


def test_non_commuting_values_are_reported():
    src = quadratic_model()
    tgt = rescaled_model()
    values = {n: tgt.algebra.gen(n) for n in "abcxywz"}  # y not rescaled
    problems = DgMorphism(src, tgt, values).check()
    assert any("y" in p for p in problems)


def test_subalgebra_inclusion_is_not_a_quasi_iso():
    one = DgPresentation("DGL", [Generator("a", 1)])
    big = quadratic_model()
    f = DgMorphism(one, big, {"a": big.algebra.gen("a")})
    assert f.check() == []
    ok, table = f.is_quasi_iso(2)
    assert not ok
    assert table[1] == {"source_dim": 1, "target_dim": 2, "rank": 1, "iso": False}


# ------------------------------------------------------------------ DGA flavor

def test_cochain_algebra_homology_is_a_truncated_polynomial_ring():
    gens = [Generator("u", 2), Generator("v", 5)]
    A = FreeGca(gens)
    u, v = A.gen("u"), A.gen("v")
    p = DgPresentation("DGA", gens, {"v": u * u * u}, algebra=A)
    assert validate(p, 8).ok
    assert homology(p, 8).dims() == [0, 1, 0, 1, 0, 0, 0, 0]
    unit = p._degree_homology(0)
    assert unit.dim == 1


def test_cochain_d_squared_violation_is_located():
    gens = [Generator("u", 2), Generator("v", 3), Generator("w", 4)]
    A = FreeGca(gens)
    u, v, w = (A.gen(n) for n in "uvw")
    p = DgPresentation("DGA", gens, {"v": u * u, "w": v * u}, algebra=A)
    report = p.validate(6)
    assert not report.ok
    assert report.issues[0].kind == "d-squared"
    assert report.issues[0].where == "w"
    assert report.issues[0].degree == 4


def test_simply_connected_flag_forbids_degree_one_generators():
    gens = [Generator("t", 1)]
    p = DgPresentation("DGA", gens, connectivity="simply-connected")
    report = p.validate(3)
    assert not report.ok
    assert report.issues[0].kind == "structure"


# ------------------------------------------------------------------ DGC flavor

def test_coalgebra_homology_is_linear_algebra():
    gens = [Generator("n", 1), Generator("m", 2), Generator("e", 4)]
    p = DgPresentation("DGC", gens,
                       differential={"m": {"n": frac(1)}},
                       comultiplication={"e": [(frac(1), "m", "m")]})
    assert p.validate(4).ok
    report = p.homology(4)
    assert report.dims() == [0, 0, 0, 1]
    assert report.by_degree[4].representatives == [{"e": frac(1)}]


def test_coalgebra_degree_errors_are_reported():
    gens = [Generator("n", 1), Generator("m", 2)]
    bad_d = DgPresentation("DGC", gens, differential={"n": {"m": frac(1)}})
    assert not bad_d.validate(2).ok
    bad_pairs = DgPresentation("DGC", gens,
                               comultiplication={"m": [(frac(1), "m", "m")]})
    assert not bad_pairs.validate(2).ok


# ------------------------------------------------------------------ DGN flavor

def dgn_bottom_algebra():
    gens = [Generator("a", 1), Generator("x", 3), Generator("y", 5),
            Generator("z", 7)]
    N = NaAlgebra(gens)
    a, x, y, z = (N.gen(n) for n in "axyz")
    diff = {
        "x": N.bracket(a, a),
        "y": 3 * N.bracket(x, a) - N.lam(3, [a, a, a]),
        "z": (4 * N.bracket(y, a) + 3 * N.bracket(x, x)
              - 6 * N.lam(3, [x, a, a]) + N.lam(4, [a, a, a, a])),
    }
    return DgPresentation("DGN", gens, diff, algebra=N)


def test_lambda_corrections_close_the_differential():
    p = dgn_bottom_algebra()
    assert p.validate(7).ok
    assert [len(p.basis(d)) for d in range(1, 8)] == [1, 1, 2, 3, 7, 16, 36]
    assert p.homology(4).dims() == [1, 0, 0, 0]


def test_without_lambda_terms_the_square_fails_at_y():
    gens = [Generator("a", 1), Generator("x", 3), Generator("y", 5)]
    N = NaAlgebra(gens)
    a, x, y = (N.gen(n) for n in "axy")
    p = DgPresentation("DGN", gens,
                       {"x": N.bracket(a, a), "y": 3 * N.bracket(x, a)},
                       algebra=N)
    report = p.validate(5)
    assert not report.ok
    assert report.issues[0].where == "y"
    assert report.issues[0].degree == 5


# ------------------------------------------------------------------- plumbing

def test_constructor_rejects_foreign_algebras_and_unknown_names():
    L = FreeGradedLie(QUOTIENT_GENS)
    other = FreeGradedLie(QUOTIENT_GENS)
    with pytest.raises(ValueError):
        DgPresentation("DGL", QUOTIENT_GENS, {"c": other.gen("a").bracket(other.gen("b"))},
                       algebra=L)
    with pytest.raises(ValueError):
        DgPresentation("DGL", QUOTIENT_GENS, {"nope": L.gen("a")}, algebra=L)
    with pytest.raises(ValueError):
        DgPresentation("DGX", QUOTIENT_GENS)


def test_morphism_requires_matching_flavors():
    s = sphere(3)
    gens = [Generator("u", 2)]
    A = FreeGca(gens)
    q = DgPresentation("DGA", gens, algebra=A)
    with pytest.raises(ValueError):
        DgMorphism(s, q, {})


def test_inhomogeneous_elements_are_rejected():
    p = quadratic_model()
    a = p.algebra.gen("a")
    c = p.algebra.gen("c")
    with pytest.raises(ValueError):
        homology_class_of(p, a + c, 4)
