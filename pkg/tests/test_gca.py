import random
from fractions import Fraction

import pytest

from ratmodels.gca import FreeGca, gca_multiply
from ratmodels.lie import Generator


def _uvw():
    return FreeGca([Generator("u", 3), Generator("v", 2), Generator("w", 5)])


def test_odd_square_vanishes():
    A = _uvw()
    u = A.gen("u")
    assert (u * u).is_zero()


def test_even_odd_commute():
    A = _uvw()
    u, v = A.gen("u"), A.gen("v")
    assert u * v == v * u


def test_odd_odd_anticommute():
    A = _uvw()
    u, w = A.gen("u"), A.gen("w")
    assert u * w == -(w * u)


def test_unit():
    A = _uvw()
    x = A.gen("u") * A.gen("v")
    assert A.one() * x == x
    assert x * A.one() == x


def test_monomials_sorted_by_degree_then_name():
    A = _uvw()
    m = A.gen("w") * A.gen("v") * A.gen("u")
    (mono, coeff), = m.terms.items()
    assert [A.generators[i].name for i in mono] == ["v", "u", "w"]
    # w passed u (odd*odd) and v (odd*even); u passed v (odd*even): sign -1
    assert coeff == Fraction(-1)


def test_graded_commutativity_property():
    rng = random.Random(21)
    A = _uvw()
    for _ in range(40):
        xs = [A.gen(rng.choice("uvw")) for _ in range(rng.randint(1, 3))]
        ys = [A.gen(rng.choice("uvw")) for _ in range(rng.randint(1, 3))]
        x = xs[0]
        for e in xs[1:]:
            x = x * e
        y = ys[0]
        for e in ys[1:]:
            y = y * e
        if x.is_zero() or y.is_zero():
            continue
        sign = -1 if (x.degree() * y.degree()) % 2 else 1
        assert gca_multiply(x, y) == sign * gca_multiply(y, x)


def test_associativity_property():
    rng = random.Random(22)
    A = _uvw()
    gens = [A.gen(n) for n in "uvw"]
    for _ in range(40):
        x, y, z = (rng.choice(gens) for _ in range(3))
        assert (x * y) * z == x * (y * z)


def test_basis_dimensions_lambda_u2():
    A = FreeGca([Generator("u", 2)])
    assert A.dims(8) == [0, 1, 0, 1, 0, 1, 0, 1]


def test_basis_dimensions_sphere_model():
    # Lambda(u2, v3): basis 1, u, v, u^2, uv, u^3, u^2 v, ...
    A = FreeGca([Generator("u", 2), Generator("v", 3)])
    assert A.dims(9) == [0, 1, 1, 1, 1, 1, 1, 1, 1]


def test_basis_enumerates_canonical_monomials():
    A = _uvw()
    names = [[A.display_monomial(m) for m in A.basis(d)] for d in (5, 7)]
    assert names[0] == ["w", "v*u"]
    assert names[1] == ["v*w", "v*v*u"]


def test_derivation_leibniz():
    # d(u) = v*v, d(v) = 0 on Lambda(u3, v2): check d(u*v) = d(u)*v
    A = FreeGca([Generator("u", 3), Generator("v", 2)])
    u, v = A.gen("u"), A.gen("v")

    def d(letter):
        return v * v if A.generators[letter].name == "u" else A.zero()

    uv = u * v
    (mono, coeff), = uv.terms.items()
    assert coeff == 1
    assert A.derive_monomial(mono, d) == v * v * v


def test_derivation_sign_on_odd_prefix():
    # mono = u*w (both odd); d(w) = q, d(u) = 0 => d(u*w) = -u*q
    A = FreeGca([Generator("u", 3), Generator("w", 5), Generator("q", 6)])
    u, w, q = A.gen("u"), A.gen("w"), A.gen("q")

    def d(letter):
        return q if A.generators[letter].name == "w" else A.zero()

    uw = u * w
    (mono, _), = uw.terms.items()
    assert A.derive_monomial(mono, d) == -(u * q)


def test_cross_algebra_rejected():
    A, B = _uvw(), _uvw()
    with pytest.raises(ValueError):
        A.gen("u") * B.gen("u")
