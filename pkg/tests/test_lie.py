import random
from fractions import Fraction
from itertools import product
from math import comb

import pytest

from ratmodels.lie import FreeGradedLie, Generator, free_gla_basis
from ratmodels.linalg import SparseMatrix

# ---------------------------------------------------------------------------
# Two independent dimension oracles.
#
# witt_dims: the graded PBW identity  1/(1 - v(t)) =
#   prod_{d even} (1-t^d)^{-l_d} * prod_{d odd} (1+t^d)^{l_d}
# solved degree by degree for the l_d.  Pure integer series arithmetic; knows
# nothing about words or brackets.
#
# leftnormed_dims: ranks of the spans of all left-normed bracket expansions
# inside the tensor algebra (its own 10-line expansion code, not the
# library's), blockwise per letter multiset.
# ---------------------------------------------------------------------------


def _polymul(p, q, cap):
    out = [0] * (cap + 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                if b and i + j <= cap:
                    out[i + j] += a * b
    return out


def witt_dims(gen_degrees, cap):
    v = [0] * (cap + 1)
    for d in gen_degrees:
        if d <= cap:
            v[d] += 1
    tensor = [0] * (cap + 1)
    tensor[0] = 1
    for n in range(1, cap + 1):
        tensor[n] = sum(v[k] * tensor[n - k] for k in range(1, n + 1))
    prod_series = [0] * (cap + 1)
    prod_series[0] = 1
    dims = []
    for d in range(1, cap + 1):
        l = tensor[d] - prod_series[d]
        dims.append(l)
        factor = [0] * (cap + 1)
        if d % 2:  # odd degree: exterior factor (1+t^d)^l
            for j in range(0, cap // d + 1):
                factor[d * j] = comb(l, j) if j <= l else 0
        else:  # even degree: symmetric factor (1-t^d)^{-l}
            for j in range(0, cap // d + 1):
                factor[d * j] = comb(l + j - 1, j) if l else (1 if j == 0 else 0)
        prod_series = _polymul(prod_series, factor, cap)
    return dims


def _oracle_bracket(s, t, degs):
    out = {}

    def acc(w, c):
        tot = out.get(w, 0) + c
        if tot:
            out[w] = tot
        else:
            out.pop(w, None)

    for ws, cs in s.items():
        for wt, ct in t.items():
            d1 = sum(degs[i] for i in ws)
            d2 = sum(degs[i] for i in wt)
            acc(ws + wt, cs * ct)
            acc(wt + ws, cs * ct if (d1 * d2) % 2 else -cs * ct)
    return out


def leftnormed_dims(gen_degrees, cap):
    degs = list(gen_degrees)
    n = len(degs)
    dims = []
    for d in range(1, cap + 1):
        sequences = []

        def extend(prefix, remaining):
            if remaining == 0:
                sequences.append(tuple(prefix))
                return
            for letter in range(n):
                if degs[letter] <= remaining:
                    prefix.append(letter)
                    extend(prefix, remaining - degs[letter])
                    prefix.pop()

        extend([], d)
        by_multiset = {}
        for seq in sequences:
            by_multiset.setdefault(tuple(sorted(seq)), []).append(seq)
        total = 0
        for seqs in by_multiset.values():
            expansions = []
            for seq in seqs:
                t = {(seq[0],): Fraction(1)}
                for letter in seq[1:]:
                    t = _oracle_bracket(t, {(letter,): Fraction(1)}, degs)
                expansions.append(t)
            support = sorted({w for e in expansions for w in e})
            index = {w: i for i, w in enumerate(support)}
            rows = {}
            for i, e in enumerate(expansions):
                for w, c in e.items():
                    rows[(i, index[w])] = c
            total += SparseMatrix(len(expansions), len(support), rows).rank()
        dims.append(total)
    return dims


# ---------------------------------------------------------------------------


def _abc():
    return FreeGradedLie([Generator("a", 1), Generator("b", 1), Generator("c", 2)])


def test_single_odd_generator_dims():
    L = FreeGradedLie([Generator("a", 1)])
    assert L.dims(4) == [1, 1, 0, 0]
    assert witt_dims([1], 4) == [1, 1, 0, 0]
    assert leftnormed_dims([1], 4) == [1, 1, 0, 0]


def test_single_even_generator_dims():
    L = FreeGradedLie([Generator("c", 2)])
    assert L.dims(4) == [0, 1, 0, 0]


def test_two_odd_generators_low_degrees():
    L = FreeGradedLie([Generator("a", 1), Generator("b", 1)])
    assert L.dims(2) == [2, 3]
    table = free_gla_basis([Generator("a", 1), Generator("b", 1)], 2)
    assert table[2] == ["[a,a]", "[a,b]", "[b,b]"]


def test_degree_three_self_bracket_square():
    L = FreeGradedLie([Generator("u", 3)])
    assert L.dims(6) == [0, 0, 1, 0, 0, 1]
    assert L.display_word(L.basis(6)[0]) == "[u,u]"


@pytest.mark.parametrize("degrees,cap", [
    ((1,), 6),
    ((2,), 6),
    ((1, 1), 6),
    ((1, 1, 2), 6),
    ((1, 1, 1), 5),
    ((1, 2, 3), 6),
    ((3,), 6),
    ((1, 1, 2, 3), 5),
])
def test_dims_match_both_oracles(degrees, cap):
    gens = [Generator(f"g{i}", d) for i, d in enumerate(degrees)]
    dims = FreeGradedLie(gens).dims(cap)
    assert dims == witt_dims(degrees, cap)
    assert dims == leftnormed_dims(degrees, cap)


def test_odd_self_bracket_is_basis_word():
    L = _abc()
    a = L.gen("a")
    aa = a.bracket(a)
    assert list(aa.terms.values()) == [Fraction(1)]
    assert L.display_word(next(iter(aa.terms))) == "[a,a]"


def test_even_self_bracket_vanishes():
    L = _abc()
    c = L.gen("c")
    assert c.bracket(c).is_zero()


def test_odd_triple_self_bracket_vanishes():
    L = _abc()
    a = L.gen("a")
    assert a.bracket(a.bracket(a)).is_zero()


def test_square_against_degree_three_element():
    # |x| = 3, |a| = 1:  [[a,a],x] = -2[[x,a],a]
    L = FreeGradedLie([Generator("a", 1), Generator("x", 3)])
    a, x = L.gen("a"), L.gen("x")
    lhs = a.bracket(a).bracket(x)
    rhs = (-2) * x.bracket(a).bracket(a)
    assert lhs == rhs


def _random_homogeneous(rng, L, cap):
    degree = rng.randint(1, cap)
    words = L.basis(degree)
    while not words:
        degree = rng.randint(1, cap)
        words = L.basis(degree)
    terms = {}
    for w in rng.sample(words, k=min(len(words), rng.randint(1, 3))):
        terms[w] = Fraction(rng.randint(-3, 3)) or Fraction(1)
    return L.from_terms(terms)


def test_graded_antisymmetry_property():
    rng = random.Random(11)
    L = _abc()
    for _ in range(25):
        x = _random_homogeneous(rng, L, 4)
        y = _random_homogeneous(rng, L, 4)
        sign = -1 if (x.degree() * y.degree()) % 2 else 1
        # [x,y] = -(-1)^{|x||y|}[y,x]
        assert x.bracket(y) == (-sign) * y.bracket(x)


def test_graded_jacobi_property():
    rng = random.Random(12)
    L = _abc()
    for _ in range(15):
        x = _random_homogeneous(rng, L, 3)
        y = _random_homogeneous(rng, L, 3)
        z = _random_homogeneous(rng, L, 3)
        sign = -1 if (x.degree() * y.degree()) % 2 else 1
        lhs = x.bracket(y.bracket(z))
        rhs = x.bracket(y).bracket(z) + sign * y.bracket(x.bracket(z))
        assert lhs == rhs


def test_normal_form_idempotence():
    rng = random.Random(13)
    L = _abc()
    for _ in range(10):
        x = _random_homogeneous(rng, L, 5)
        assert L.from_terms(x.terms) == x
        assert L.element_from_tensor(L.tensor_expand(x.terms)) == x


def test_derivation_on_words():
    # d(a) = d(b) = 0, d(x) = [a,b]  =>  d([a,x]) = -[a,[a,b]] = [[a,b],a]
    L = FreeGradedLie([Generator("a", 1), Generator("b", 1), Generator("x", 3)])
    a, b = L.gen("a"), L.gen("b")

    def d(letter):
        return a.bracket(b) if L.generators[letter].name == "x" else L.zero()

    ax = a.bracket(L.gen("x"))
    (word, coeff), = ax.terms.items()
    assert coeff == Fraction(1)
    assert L.derive_word(word, d) == a.bracket(b).bracket(a)
    assert L.derive_word(word, d) == -(a.bracket(a.bracket(b)))


def test_degree_zero_generator_rejected():
    with pytest.raises(ValueError):
        FreeGradedLie([Generator("e", 0)])


def test_cross_algebra_bracket_rejected():
    L1 = FreeGradedLie([Generator("a", 1)])
    L2 = FreeGradedLie([Generator("a", 1)])
    with pytest.raises(ValueError):
        L1.gen("a").bracket(L2.gen("a"))


def test_duplicate_generator_names_rejected():
    with pytest.raises(ValueError):
        FreeGradedLie([Generator("a", 1), Generator("a", 2)])
