"""Free graded-anticommutative non-associative algebras with formal
lambda-generators.

Words are binary bracket trees over the generators, plus formal nodes
``lam3(x,y,z)`` / ``lam4(w,x,y,z)`` whose arguments are themselves words.
Graded anticommutativity IS imposed ([u,v] = -(-1)^{|u||v|}[v,u], so [u,u]=0
for even u), the Jacobi identity is NOT -- its failure is exactly what the
lambda-generators bound:

    d lam3(x,y,z) = J(x,y,z) - lam3(dx,y,z) - (-1)^{|x|} lam3(x,dy,z)
                             - (-1)^{|x|+|y|} lam3(x,y,dz)

with J the graded Jacobiator (zero in any honest Lie algebra), and

    d lam4 = sum over (3,1)-unshuffles of chi * [lam3(.,.,.), .]
           - sum over (2,2)-unshuffles of chi * lam3([.,.],.,.)
           - argument terms,

normalized so that d lam4(a,a,a,a) = 4[lam3(a,a,a),a] - 6 lam3([a,a],a,a)
for odd a.  Internal degree of a lambda-word is (sum of argument degrees) +
(arity - 2).  Lambda-words are graded-antisymmetric in their arguments, so
arguments are stored sorted, with the Koszul chi-sign in the coefficient.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Callable, Mapping, Optional, Sequence

from .lie import FreeGradedLie, Generator, LieElement
from .linalg import ONE, ZERO, frac

# word encodings (nested hashable tuples)
#   ("g", index)                       generator leaf
#   ("p", left, right)                 bracket node, canonical child order
#   ("l", arity, (arg, arg, ...))      lambda node, canonical argument order
NaWord = tuple


class NaAlgebra:
    """Free DGN-style algebra: binary brackets, no Jacobi, formal lambdas."""

    def __init__(self, generators: Sequence[Generator]):
        gens = tuple(generators)
        names = [g.name for g in gens]
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names in one algebra")
        for g in gens:
            if g.degree < 1:
                raise ValueError(
                    f"generator {g.name!r} has degree {g.degree}; "
                    "only positively graded algebras are supported")
        self.generators = gens
        self._index = {g.name: i for i, g in enumerate(gens)}
        self._degree_cache: dict[NaWord, int] = {}
        self._key_cache: dict[NaWord, tuple[int, ...]] = {}
        self._basis_cache: dict[int, tuple[NaWord, ...]] = {}

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown generator {name!r}") from None

    # ------------------------------------------------------------------ words

    def word_degree(self, word: NaWord) -> int:
        cached = self._degree_cache.get(word)
        if cached is None:
            tag = word[0]
            if tag == "g":
                cached = self.generators[word[1]].degree
            elif tag == "p":
                cached = self.word_degree(word[1]) + self.word_degree(word[2])
            else:
                cached = sum(self.word_degree(a) for a in word[2]) + word[1] - 2
            self._degree_cache[word] = cached
        return cached

    def _key(self, word: NaWord) -> tuple[int, ...]:
        """Degree-graded total order on words (flattened preorder walk)."""
        cached = self._key_cache.get(word)
        if cached is None:
            tag = word[0]
            if tag == "g":
                body: tuple[int, ...] = (0, word[1])
            elif tag == "p":
                body = (1,) + self._key(word[1]) + self._key(word[2])
            else:
                body = (2, word[1])
                for a in word[2]:
                    body += self._key(a)
            cached = (self.word_degree(word),) + body
            self._key_cache[word] = cached
        return cached

    def pair_word(self, u: NaWord, v: NaWord) -> Optional[tuple[int, NaWord]]:
        """Canonical bracket word for [u,v]: (sign, word), or None if zero."""
        ku, kv = self._key(u), self._key(v)
        if ku > kv:
            sign = 1 if (self.word_degree(u) * self.word_degree(v)) % 2 else -1
            return sign, ("p", v, u)
        if ku == kv and self.word_degree(u) % 2 == 0:
            return None
        return 1, ("p", u, v)

    def lam_word(self, arity: int, args: Sequence[NaWord]) -> Optional[tuple[int, NaWord]]:
        """Canonical lambda word with sorted arguments: (chi sign, word)."""
        if arity not in (3, 4) or len(args) != arity:
            raise ValueError("lambda arity must be 3 or 4 and match arguments")
        items = list(args)
        sign = 1
        for i in range(1, len(items)):
            j = i
            while j > 0 and self._key(items[j - 1]) > self._key(items[j]):
                if (self.word_degree(items[j - 1]) * self.word_degree(items[j])) % 2 == 0:
                    sign = -sign
                items[j - 1], items[j] = items[j], items[j - 1]
                j -= 1
        for a, b in zip(items, items[1:]):
            if a == b and self.word_degree(a) % 2 == 0:
                return None  # transposing the repeat is sign -1
        return sign, ("l", arity, tuple(items))

    def display_word(self, word: NaWord) -> str:
        tag = word[0]
        if tag == "g":
            return self.generators[word[1]].name
        if tag == "p":
            return f"[{self.display_word(word[1])},{self.display_word(word[2])}]"
        args = ",".join(self.display_word(a) for a in word[2])
        return f"lam{word[1]}({args})"

    # -------------------------------------------------------------- elements

    def zero(self) -> "NaElement":
        return NaElement(self, {})

    def gen(self, name: str) -> "NaElement":
        return NaElement(self, {("g", self.index_of(name)): ONE})

    def word_as_element(self, word: NaWord, coeff=ONE) -> "NaElement":
        coeff = frac(coeff)
        return NaElement(self, {word: coeff} if coeff else {})

    def bracket(self, x: "NaElement", y: "NaElement") -> "NaElement":
        self._check(x)
        self._check(y)
        terms: dict[NaWord, Fraction] = {}
        for wu, cu in x.terms.items():
            for wv, cv in y.terms.items():
                packed = self.pair_word(wu, wv)
                if packed is None:
                    continue
                sign, word = packed
                total = terms.get(word, ZERO) + sign * cu * cv
                if total:
                    terms[word] = total
                else:
                    terms.pop(word, None)
        return NaElement(self, terms)

    def lam(self, arity: int, args: Sequence["NaElement"]) -> "NaElement":
        """Multilinear lambda on elements."""
        for a in args:
            self._check(a)
        terms: dict[NaWord, Fraction] = {}

        def expand(chosen: list[NaWord], coeff: Fraction, rest: int) -> None:
            if rest == len(args):
                packed = self.lam_word(arity, chosen)
                if packed is None:
                    return
                sign, word = packed
                total = terms.get(word, ZERO) + sign * coeff
                if total:
                    terms[word] = total
                else:
                    terms.pop(word, None)
                return
            for w, c in args[rest].terms.items():
                chosen.append(w)
                expand(chosen, coeff * c, rest + 1)
                chosen.pop()

        expand([], ONE, 0)
        return NaElement(self, terms)

    def jacobi_defect(self, x: "NaElement", y: "NaElement", z: "NaElement") -> "NaElement":
        """The graded Jacobiator J(x,y,z) = [[x,y],z]
        - (-1)^{|y||z|}[[x,z],y] + (-1)^{|x|(|y|+|z|)}[[y,z],x]."""
        dx, dy, dz = x.degree() or 0, y.degree() or 0, z.degree() or 0
        first = self.bracket(self.bracket(x, y), z)
        second = self.bracket(self.bracket(x, z), y)
        third = self.bracket(self.bracket(y, z), x)
        s2 = -1 if (dy * dz) % 2 else 1
        s3 = -1 if (dx * (dy + dz)) % 2 else 1
        return first - s2 * second + s3 * third

    # ------------------------------------------------------------ differential

    def d_element(self, x: "NaElement",
                  d_of_letter: Callable[[int], "NaElement"]) -> "NaElement":
        self._check(x)
        out = self.zero()
        for word, coeff in x.terms.items():
            out = out + coeff * self._d_word(word, d_of_letter)
        return out

    def _d_word(self, word: NaWord,
                d_of_letter: Callable[[int], "NaElement"]) -> "NaElement":
        tag = word[0]
        if tag == "g":
            return d_of_letter(word[1])
        if tag == "p":
            left, right = word[1], word[2]
            out = self.bracket(self._d_word(left, d_of_letter),
                               self.word_as_element(right))
            second = self.bracket(self.word_as_element(left),
                                  self._d_word(right, d_of_letter))
            return out - second if self.word_degree(left) % 2 else out + second
        arity, args = word[1], word[2]
        arg_elements = [self.word_as_element(a) for a in args]
        degrees = [self.word_degree(a) for a in args]
        if arity == 3:
            out = self.jacobi_defect(*arg_elements)
        else:
            out = self._lam4_leading(args, degrees)
        # argument terms: - sum_i (-1)^{|x_1|+...+|x_{i-1}|} lam(..., dx_i, ...)
        prefix = 0
        for i, a in enumerate(args):
            da = self._d_word(a, d_of_letter)
            if not da.is_zero():
                replaced = arg_elements[:i] + [da] + arg_elements[i + 1:]
                term = self.lam(arity, replaced)
                out = out + term if (prefix % 2) else out - term
            prefix += degrees[i]
        return out

    def _lam4_leading(self, args: tuple[NaWord, ...], degrees: list[int]) -> "NaElement":
        """The boundary of a lam4 word before argument terms:
        (3,1)-unshuffle brackets of lam3 minus (2,2)-unshuffle lam3 of brackets."""
        out = self.zero()
        for triple in combinations(range(4), 3):
            rest = [i for i in range(4) if i not in triple]
            order = list(triple) + rest
            chi = self._chi(order, degrees)
            term = self.bracket(
                self.lam(3, [self.word_as_element(args[i]) for i in triple]),
                self.word_as_element(args[rest[0]]))
            out = out + chi * term
        for pair in combinations(range(4), 2):
            rest = [i for i in range(4) if i not in pair]
            order = list(pair) + rest
            chi = self._chi(order, degrees)
            bracket01 = self.bracket(self.word_as_element(args[pair[0]]),
                                     self.word_as_element(args[pair[1]]))
            term = self.lam(3, [bracket01,
                                self.word_as_element(args[rest[0]]),
                                self.word_as_element(args[rest[1]])])
            out = out - chi * term
        return out

    @staticmethod
    def _chi(order: list[int], degrees: list[int]) -> int:
        """Graded antisymmetric Koszul sign of the permutation i -> order[i]:
        every inversion (u before v with u > v) contributes -(-1)^{|u||v|}."""
        sign = 1
        for a in range(len(order)):
            for b in range(a + 1, len(order)):
                if order[a] > order[b]:
                    if (degrees[order[a]] * degrees[order[b]]) % 2 == 0:
                        sign = -sign
        return sign

    # ----------------------------------------------------------------- basis

    def basis(self, degree: int) -> tuple[NaWord, ...]:
        """All canonical words of one internal degree (grows quickly; meant
        for the small degree caps the differential checks run at)."""
        if degree < 1:
            return ()
        if degree not in self._basis_cache:
            words: list[NaWord] = [("g", i) for i, g in enumerate(self.generators)
                                   if g.degree == degree]
            for d1 in range(1, degree // 2 + 1):
                d2 = degree - d1
                if d1 < d2:
                    for u in self.basis(d1):
                        for v in self.basis(d2):
                            words.append(("p", u, v))
                else:  # d1 == d2: canonical order, drop even self-brackets
                    half = self.basis(d1)
                    odd = d1 % 2
                    for i, u in enumerate(half):
                        for v in half[i if odd else i + 1:]:
                            words.append(("p", u, v))
            for arity in (3, 4):
                target = degree - (arity - 2)
                if target < arity:  # each argument has degree >= 1
                    continue
                pool = []
                for d in range(1, target - arity + 2):
                    pool.extend(self.basis(d))
                pool.sort(key=self._key)

                def choose(start: int, chosen: list[NaWord], remaining: int) -> None:
                    if len(chosen) == arity:
                        if remaining == 0:
                            words.append(("l", arity, tuple(chosen)))
                        return
                    slots_left = arity - len(chosen)
                    for idx in range(start, len(pool)):
                        w = pool[idx]
                        dw = self.word_degree(w)
                        if dw * slots_left > remaining:
                            break  # pool sorted by degree-graded key
                        if chosen and chosen[-1] == w and dw % 2 == 0:
                            continue  # even repeat vanishes
                        chosen.append(w)
                        choose(idx, chosen, remaining - dw)
                        chosen.pop()

                choose(0, [], target)
            words.sort(key=self._key)
            self._basis_cache[degree] = tuple(words)
        return self._basis_cache[degree]

    def _check(self, element: "NaElement") -> None:
        if element.algebra is not self:
            raise ValueError("elements belong to different algebras")


class NaElement:
    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: NaAlgebra, terms: dict[NaWord, Fraction]):
        self.algebra = algebra
        self.terms = terms

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> Optional[int]:
        degrees = {self.algebra.word_degree(w) for w in self.terms}
        if not degrees:
            return None
        if len(degrees) > 1:
            raise ValueError("element is not homogeneous")
        return degrees.pop()

    def _combine(self, other: "NaElement", sign: int) -> "NaElement":
        if other.algebra is not self.algebra:
            raise ValueError("elements belong to different algebras")
        terms = dict(self.terms)
        for word, coeff in other.terms.items():
            total = terms.get(word, ZERO) + sign * coeff
            if total:
                terms[word] = total
            else:
                terms.pop(word, None)
        return NaElement(self.algebra, terms)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return NaElement(self.algebra, {w: -c for w, c in self.terms.items()})

    def scale(self, scalar) -> "NaElement":
        scalar = frac(scalar)
        if not scalar:
            return NaElement(self.algebra, {})
        return NaElement(self.algebra, {w: scalar * c for w, c in self.terms.items()})

    __rmul__ = scale
    __mul__ = scale

    def bracket(self, other: "NaElement") -> "NaElement":
        return self.algebra.bracket(self, other)

    def __eq__(self, other):
        return (isinstance(other, NaElement) and other.algebra is self.algebra
                and other.terms == self.terms)

    def __hash__(self):
        raise TypeError("NaElement is unhashable")

    def sorted_terms(self) -> list[tuple[NaWord, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: self.algebra._key(kv[0]))

    def display(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for word, coeff in self.sorted_terms():
            text = self.algebra.display_word(word)
            if coeff == 1:
                term = text
            elif coeff == -1:
                term = f"-{text}"
            else:
                term = f"{coeff}*{text}"
            parts.append(term)
        out = parts[0]
        for term in parts[1:]:
            out += f" - {term[1:]}" if term.startswith("-") else f" + {term}"
        return out

    def __repr__(self):
        return self.display()


# ------------------------------------------------------------- Lie interface

def na_from_lie(x: LieElement, target: NaAlgebra) -> NaElement:
    """Canonical section: each Lie basis word maps to its bracketing tree."""
    L = x.algebra
    out = target.zero()

    def section(word) -> NaElement:
        split = L.split_word(word)
        if split is None:
            return target.gen(L.generators[word[0]].name)
        left, right = split
        return target.bracket(section(left), section(right))

    for word, coeff in x.terms.items():
        out = out + coeff * section(word)
    return out


def project_to_lie(x: NaElement, target: FreeGradedLie) -> LieElement:
    """The quotient homomorphism onto the Lie algebra: brackets map to
    brackets, every lambda-word maps to zero."""
    N = x.algebra
    cache: dict[NaWord, LieElement] = {}

    def proj(word: NaWord) -> LieElement:
        cached = cache.get(word)
        if cached is None:
            tag = word[0]
            if tag == "g":
                cached = target.gen(N.generators[word[1]].name)
            elif tag == "p":
                cached = target.bracket(proj(word[1]), proj(word[2]))
            else:
                cached = target.zero()
            cache[word] = cached
        return cached

    out = target.zero()
    for word, coeff in x.terms.items():
        out = out + coeff * proj(word)
    return out
