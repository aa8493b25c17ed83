"""Tests for model construction: bigraded, minimal, filtered, formality.

The worked fixture throughout is the quotient Lie algebra
P = L(a,b,c)/([a,a], [[c,a],[b,a]]) and its seven-generator bigraded model,
plus the perturbed differential that makes the same underlying algebra
non-formal.  Expected homology dimensions come from the independent
ideal-closure oracle in test_dg.
"""

from fractions import Fraction

import pytest

from ratmodels.dg import DgMorphism, DgPresentation
from ratmodels.gca import FreeGca
from ratmodels.lie import FreeGradedLie, Generator
from ratmodels.models import (BigradedModel, GradedAlgebraPresentation,
                              bigraded_model, extract_assignment,
                              filtered_model, is_formal_up_to,
                              minimal_model_dga, normalize_primitive,
                              perturbation_system, present_homology,
                              substitute)

QUOTIENT_GENS = [Generator("a", 1), Generator("b", 1), Generator("c", 2)]
MODEL_GENS = [Generator("a", 1), Generator("b", 1), Generator("c", 2),
              Generator("x", 3), Generator("y", 5), Generator("w", 6),
              Generator("z", 7)]
P_DIMS = [2, 3, 3, 4, 8, 16]   # frozen from the ideal-closure oracle


def quotient_presentation():
    L = FreeGradedLie(QUOTIENT_GENS)
    a, b, c = L.gen("a"), L.gen("b"), L.gen("c")
    return GradedAlgebraPresentation(
        "GLA", QUOTIENT_GENS,
        [a.bracket(a), c.bracket(a).bracket(b.bracket(a))], algebra=L)


def quadratic_model():
    L = FreeGradedLie(MODEL_GENS)
    a, b, c, x, y, w, z = (L.gen(n) for n in "abcxywz")
    return DgPresentation("DGL", MODEL_GENS, {
        "x": a.bracket(a),
        "y": 3 * x.bracket(a),
        "w": c.bracket(a).bracket(b.bracket(a)),
        "z": 4 * y.bracket(a) + 3 * x.bracket(x),
    }, algebra=L)


def perturbed_model():
    L = FreeGradedLie(MODEL_GENS)
    a, b, c, x, y, w, z = (L.gen(n) for n in "abcxywz")
    return DgPresentation("DGL", MODEL_GENS, {
        "x": a.bracket(a),
        "y": 3 * x.bracket(a) - b.bracket(a).bracket(c),
        "w": c.bracket(a).bracket(b.bracket(a)),
        "z": (4 * y.bracket(a) + 3 * x.bracket(x) - 4 * w
              - 2 * x.bracket(b).bracket(c)),
    }, algebra=L)


_CACHE: dict = {}


def the_bigraded_model() -> BigradedModel:
    if "bg" not in _CACHE:
        _CACHE["bg"] = bigraded_model(quotient_presentation(), 7)
    return _CACHE["bg"]


# ------------------------------------------------------------------ plumbing

def test_normalize_primitive():
    L = FreeGradedLie(QUOTIENT_GENS)
    a, b = L.gen("a"), L.gen("b")
    e = Fraction(-2, 3) * a.bracket(b)
    n = normalize_primitive(e)
    assert n.display() == "[a,b]"
    e2 = Fraction(4, 6) * a.bracket(a) - 2 * a.bracket(b)
    n2 = normalize_primitive(e2)
    assert n2.display() == "[a,a] - 3*[a,b]"


def test_substitute_extends_to_a_bracket_morphism():
    L = FreeGradedLie(QUOTIENT_GENS)
    a, b, c = L.gen("a"), L.gen("b"), L.gen("c")
    values = {"a": a + b, "b": b, "c": c}
    lhs = substitute(a.bracket(b).bracket(c), values, L)
    rhs = (a + b).bracket(b).bracket(c)
    assert lhs == rhs


# ------------------------------------------------------- bigraded, Lie flavor

def test_bigraded_model_bidegree_table():
    bg = the_bigraded_model()
    table = sorted(bg.bidegrees.values())
    assert table == [(1, 0), (1, 0), (2, 0), (3, 1), (5, 2), (6, 1), (7, 3)]
    assert bg.bidegrees["a"] == (1, 0)
    assert bg.bidegrees["c"] == (2, 0)
    # one generator per higher bidegree, deterministic names
    assert bg.bidegrees["x3"] == (3, 1)
    assert bg.bidegrees["x6"] == (6, 1)
    assert bg.bidegrees["x5"] == (5, 2)
    assert bg.bidegrees["x7"] == (7, 3)


def test_bigraded_model_differentials_frozen():
    p = the_bigraded_model().underlying
    assert p.d_of_gen("a").is_zero()
    assert p.d_of_gen("x3").display() == "[a,a]"
    assert p.d_of_gen("x6").display() == "[[a,b],[a,c]]"
    assert p.d_of_gen("x5").display() == "[a,x3]"
    assert p.d_of_gen("x7").display() == "4*[a,x5] + [x3,x3]"


def test_bigraded_model_invariants():
    bg = the_bigraded_model()
    p = bg.underlying
    assert p.validate(7).ok
    # homology is P again (concentrated in homological degree zero)
    assert p.homology(6).dims() == P_DIMS
    for name in p.gen_names:
        value = p.d_of_gen(name)
        _, hom = bg.bidegrees[name]
        if value.is_zero():
            continue
        # minimality: no word of length one in any differential
        assert all(len(word) >= 2 for word in value.terms)
        # homological degree drops by exactly one
        assert {bg.hom_degree_of_word(wd) for wd in value.terms} == {hom - 1}


def test_bigraded_model_matches_reference_after_rescaling():
    """y -> 3*(5,2)-generator and z -> 3*(7,3)-generator reproduces the
    reference differential table exactly."""
    bg = the_bigraded_model()
    tgt = bg.underlying.algebra
    reference = quadratic_model()
    values = {"a": tgt.gen("a"), "b": tgt.gen("b"), "c": tgt.gen("c"),
              "x": tgt.gen("x3"), "w": tgt.gen("x6"),
              "y": 3 * tgt.gen("x5"), "z": 3 * tgt.gen("x7")}
    f = DgMorphism(reference, bg.underlying, values)
    assert f.check() == []
    assert f.is_quasi_iso(5)[0]


def test_bigraded_model_of_free_input_has_zero_differential():
    gens = [Generator("a", 1), Generator("u", 3)]
    h = GradedAlgebraPresentation("GLA", gens, [])
    bg = bigraded_model(h, 6)
    assert set(bg.underlying.gen_names) == {"a", "u"}
    assert all(hom == 0 for _, hom in bg.bidegrees.values())
    assert all(bg.underlying.d_of_gen(n).is_zero() for n in bg.underlying.gen_names)


def test_bigraded_model_skips_redundant_relations():
    L = FreeGradedLie(QUOTIENT_GENS)
    a, b = L.gen("a"), L.gen("b")
    h = GradedAlgebraPresentation(
        "GLA", QUOTIENT_GENS,
        [a.bracket(a), a.bracket(a).bracket(b)],  # second lies in the ideal
        algebra=L)
    bg = bigraded_model(h, 4)
    stage1 = bg.generators_of_stage(1)
    assert len(stage1) == 1


# ------------------------------------------------------- bigraded, GCA flavor

def test_bigraded_model_truncated_polynomial_algebra():
    gens = [Generator("u", 2)]
    A = FreeGca(gens)
    u = A.gen("u")
    h = GradedAlgebraPresentation("GCA", gens, [u * u * u], algebra=A)
    bg = bigraded_model(h, 8)
    assert bg.bidegrees == {"u": (2, 0), "v5": (5, 1)}
    assert bg.underlying.d_of_gen("v5").display() == "u*u*u"
    assert bg.underlying.homology(8).dims() == [0, 1, 0, 1, 0, 0, 0, 0]
    system = perturbation_system(bg, 8)
    assert system.variables == []
    assert system.equations == []


def test_bigraded_model_requires_simply_connected_gca():
    gens = [Generator("t", 1)]
    h = GradedAlgebraPresentation("GCA", gens, [])
    with pytest.raises(ValueError):
        bigraded_model(h, 4)


# ---------------------------------------------------------- minimal DGA model

def nonminimal_sphere_like():
    gens = [Generator("u", 2), Generator("v", 3), Generator("t", 3),
            Generator("w", 4)]
    A = FreeGca(gens)
    u, v, t, w = (A.gen(n) for n in "uvtw")
    return DgPresentation("DGA", gens, {"v": u * u, "t": w}, algebra=A)


def test_minimal_model_of_contractible_extension():
    a = nonminimal_sphere_like()
    assert a.validate(8).ok
    m, q = minimal_model_dga(a, 7)
    assert [(g.name, g.degree) for g in m.generators] == [("m2", 2), ("m3", 3)]
    assert m.d_of_gen("m3").display() == "m2*m2"
    assert q.values["m2"].display() == "u"
    assert q.values["m3"].display() == "v"
    assert q.check() == []
    assert q.is_quasi_iso(6)[0]


def test_minimal_input_is_returned_unchanged():
    gens = [Generator("u", 2), Generator("v", 3)]
    A = FreeGca(gens)
    u = A.gen("u")
    a = DgPresentation("DGA", gens, {"v": u * u}, algebra=A)
    m, q = minimal_model_dga(a, 7)
    assert m is a
    assert q.values["u"].display() == "u"


def test_minimal_model_is_idempotent():
    m, _ = minimal_model_dga(nonminimal_sphere_like(), 7)
    m2, _ = minimal_model_dga(m, 7)
    assert sorted(g.degree for g in m2.generators) == sorted(
        g.degree for g in m.generators)


def test_minimal_model_input_checks():
    s = DgPresentation("DGL", [Generator("a", 1)])
    with pytest.raises(ValueError):
        minimal_model_dga(s, 5)
    gens = [Generator("t", 1)]
    A = FreeGca(gens)
    loop = DgPresentation("DGA", gens, algebra=A)
    with pytest.raises(ValueError):
        minimal_model_dga(loop, 5)


# -------------------------------------------------------------- filtered model

def the_filtered_model():
    if "fm" not in _CACHE:
        _CACHE["fm"] = filtered_model(the_bigraded_model(), perturbed_model(), 7)
    return _CACHE["fm"]


def test_filtered_model_perturbation_support_and_values():
    fm = the_filtered_model()
    assert sorted(fm.perturbation) == ["x5", "x7"]
    assert fm.perturbation["x5"].display() == "-1/3*[a,[b,c]] - 1/3*[[a,c],b]"
    assert fm.perturbation["x7"].display() == "-4/3*x6 - 2/3*[[b,x3],c]"


def test_filtered_model_comparison_is_a_quasi_iso():
    fm = the_filtered_model()
    values = fm.comparison.values
    assert values["x3"].display() == "x"
    assert values["x5"].display() == "1/3*y"
    assert values["x6"].display() == "w"
    assert values["x7"].display() == "1/3*z"
    assert fm.comparison.check() == []
    assert fm.presentation().validate(8).ok
    assert fm.comparison.is_quasi_iso(5)[0]


def test_filtration_drop_by_two():
    fm = the_filtered_model()
    bg = fm.base
    for name, value in fm.perturbation.items():
        _, hom = bg.bidegrees[name]
        for word in value.terms:
            assert bg.hom_degree_of_word(word) <= hom - 2


def test_filtered_model_of_itself_needs_no_perturbation():
    bg = the_bigraded_model()
    fm = filtered_model(bg, bg.underlying, 7)
    assert fm.perturbation == {}
    assert fm.comparison.check() == []


def test_low_cap_forces_zero_perturbation():
    bg = bigraded_model(quotient_presentation(), 4)
    fm = filtered_model(bg, quadratic_model(), 4)
    assert fm.perturbation == {}


def test_filtered_model_rejects_wrong_homology():
    bg = the_bigraded_model()
    free = DgPresentation("DGL", QUOTIENT_GENS)
    with pytest.raises(ValueError):
        filtered_model(bg, free, 6)


# --------------------------------------------------------- perturbation system

def test_perturbation_system_counts_and_solutions():
    bg = the_bigraded_model()
    system = perturbation_system(bg, 7)
    assert len(system.variables) == 54
    assert len(system.equations) == 10
    doc = system.as_json_doc()
    assert doc["schema"] == 1
    assert system.evaluate({}) == []                      # zero solution
    assignment = extract_assignment(the_filtered_model())
    assert system.evaluate(assignment) == []              # deformation solution
    broken = dict(assignment)
    broken["x7|x6"] = Fraction(5)
    assert system.evaluate(broken) != []


def test_perturbation_system_cap_five_is_unconstrained():
    bg = the_bigraded_model()
    system = perturbation_system(bg, 5)
    names = [v["name"] for v in system.variables]
    assert names == ["x5|[a,[a,c]]", "x5|[a,[b,c]]", "x5|[[a,c],b]",
                     "x5|[b,[b,c]]", "x5|[a,[a,[a,b]]]", "x5|[a,[[a,b],b]]",
                     "x5|[[[a,b],b],b]"]
    assert system.equations == []


# --------------------------------------------------------- homology presenting

def test_present_homology_of_the_quadratic_model():
    h = present_homology(quadratic_model(), 5)
    assert [(g.name, g.degree) for g in h.generators] == [
        ("h1", 1), ("h1_1", 1), ("h2", 2)]
    assert [r.display() for r in h.relations] == [
        "[h1,h1]", "[h1,[[h1,h2],h1_1]]"]
    p = quadratic_model()
    for name, rep in h.class_reps.items():
        assert p.d_element(rep).is_zero()


# ----------------------------------------------------------------- formality

def test_quadratic_model_is_formal_to_cap_seven():
    result = is_formal_up_to(quadratic_model(), 7)
    assert result.status == "formal"


def test_perturbed_model_is_not_formal_at_cap_five():
    result = is_formal_up_to(perturbed_model(), 5)
    assert result.status == "not-formal"
    assert result.obstruction_degree == 4
    assert result.obstruction == "[a,x]"


def test_free_lie_algebra_is_formal():
    free = DgPresentation("DGL", [Generator("a", 1), Generator("u", 3)])
    assert is_formal_up_to(free, 6).status == "formal"


def test_elliptic_dga_is_formal():
    gens = [Generator("u", 2), Generator("v", 5)]
    A = FreeGca(gens)
    u = A.gen("u")
    p = DgPresentation("DGA", gens, {"v": u * u * u}, algebra=A)
    assert is_formal_up_to(p, 8).status == "formal"


def test_budget_exhaustion_is_inconclusive():
    result = is_formal_up_to(quadratic_model(), 7, budget=1)
    assert result.status == "inconclusive"
    assert "budget" in result.detail


def test_result_refuses_boolean_coercion():
    result = is_formal_up_to(quadratic_model(), 4)
    with pytest.raises(TypeError):
        bool(result)
