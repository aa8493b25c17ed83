"""Free graded Lie algebras over Q with Lyndon-word normal forms.

A basis word is stored as the flattened tuple of its letters (generator
indices).  Among flattened tuples this is unambiguous: the basis consists of

* the standard bracketing ``b(w)`` of each Lyndon word ``w``, and
* the self-brackets ``[b(u), b(u)]`` for Lyndon ``u`` of odd internal degree
  (flattened to ``u + u``, never itself Lyndon),

the graded (super) version of the Lyndon-Shirshov basis in characteristic 0.

Normal forms are computed through the embedding into the tensor algebra:
expand brackets via ``[x, y] = x (x) y - (-1)^{|x||y|} y (x) x`` and solve the
resulting coordinates against the expansions of the candidate basis words of
the same letter multiset.  The expansion matrices are cached per multiset, and
an inconsistent solve raises immediately rather than returning garbage (it
would mean the input was not a Lie element, which cannot happen for brackets
of basis words).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Callable, Mapping, Optional, Sequence

from .linalg import ONE, ZERO, SparseMatrix, frac

Word = tuple[int, ...]
TensorElement = dict[Word, Fraction]


@dataclass(frozen=True)
class Generator:
    """A named generator with a positive internal degree."""

    name: str
    degree: int


class FreeGradedLie:
    """The free graded Lie algebra on an ordered list of generators.

    The declaration order of the generators fixes the letter order used by
    the Lyndon-word machinery, so two algebras over the same generators in
    the same order produce identical normal forms.
    """

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
        self._index: dict[str, int] = {g.name: i for i, g in enumerate(gens)}
        self._degrees = tuple(g.degree for g in gens)
        self._rho_cache: dict[Word, TensorElement] = {}
        self._multiset_cache: dict[Word, tuple] = {}
        self._lyndon_cache: dict[int, tuple[Word, ...]] = {}

    # ------------------------------------------------------------- generators

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown generator {name!r}") from None

    def degree_of_letter(self, letter: int) -> int:
        return self._degrees[letter]

    def gen(self, name: str) -> "LieElement":
        return LieElement(self, {(self.index_of(name),): ONE})

    def zero(self) -> "LieElement":
        return LieElement(self, {})

    def word_as_element(self, word: Word) -> "LieElement":
        return LieElement(self, {word: ONE})

    def from_terms(self, terms: Mapping[Word, Fraction]) -> "LieElement":
        clean = {}
        for word, coeff in terms.items():
            coeff = frac(coeff)
            if not coeff:
                continue
            if not self.is_basis_word(word):
                raise ValueError(f"{word} is not a normal-form basis word")
            clean[word] = coeff
        return LieElement(self, clean)

    # ------------------------------------------------------------------ words

    def word_degree(self, word: Word) -> int:
        return sum(self._degrees[i] for i in word)

    @staticmethod
    def _is_lyndon(word: Word) -> bool:
        return all(word < word[i:] for i in range(1, len(word)))

    def _square_half(self, word: Word) -> Optional[Word]:
        """The Lyndon half u when word = u+u with |u| odd, else None."""
        n = len(word)
        if n % 2:
            return None
        half = word[: n // 2]
        if word[n // 2:] != half:
            return None
        if not self._is_lyndon(half):
            return None
        if self.word_degree(half) % 2 == 0:
            return None
        return half

    def is_basis_word(self, word: Word) -> bool:
        if not word or not all(0 <= i < len(self.generators) for i in word):
            return False
        return self._is_lyndon(word) or self._square_half(word) is not None

    def split_word(self, word: Word) -> Optional[tuple[Word, Word]]:
        """The canonical bracketing split [left, right], None for letters."""
        if len(word) == 1:
            return None
        half = self._square_half(word)
        if half is not None:
            return half, half
        if not self._is_lyndon(word):
            raise ValueError(f"{word} is not a basis word")
        # standard factorization: right factor = least proper suffix
        right = min(word[i:] for i in range(1, len(word)))
        return word[: -len(right)], right

    def display_word(self, word: Word) -> str:
        split = self.split_word(word)
        if split is None:
            return self.generators[word[0]].name
        left, right = split
        return f"[{self.display_word(left)},{self.display_word(right)}]"

    # ------------------------------------------------------------------ basis

    def _lyndon_words(self, degree: int) -> tuple[Word, ...]:
        if degree not in self._lyndon_cache:
            found: list[Word] = []
            n = len(self.generators)

            def extend(prefix: list[int], remaining: int) -> None:
                if remaining == 0:
                    word = tuple(prefix)
                    if self._is_lyndon(word):
                        found.append(word)
                    return
                for letter in range(n):
                    d = self._degrees[letter]
                    if d <= remaining:
                        prefix.append(letter)
                        extend(prefix, remaining - d)
                        prefix.pop()

            extend([], degree)
            self._lyndon_cache[degree] = tuple(found)
        return self._lyndon_cache[degree]

    def basis(self, degree: int) -> list[Word]:
        """Canonical basis words of one internal degree, shortest first."""
        if degree < 1:
            return []
        words = list(self._lyndon_words(degree))
        if degree % 2 == 0 and (degree // 2) % 2 == 1:
            words.extend(u + u for u in self._lyndon_words(degree // 2))
        return sorted(words, key=lambda w: (len(w), w))

    def dims(self, cap: int) -> list[int]:
        return [len(self.basis(d)) for d in range(1, cap + 1)]

    # ------------------------------------------------- tensor-algebra embedding

    def tensor_word_degree(self, word: Word) -> int:
        return sum(self._degrees[i] for i in word)

    def tensor_bracket(self, s: TensorElement, t: TensorElement) -> TensorElement:
        out: TensorElement = {}

        def acc(word: Word, value: Fraction) -> None:
            total = out.get(word, ZERO) + value
            if total:
                out[word] = total
            else:
                out.pop(word, None)

        for ws, cs in s.items():
            ds = self.tensor_word_degree(ws)
            for wt, ct in t.items():
                c = cs * ct
                acc(ws + wt, c)
                if (ds * self.tensor_word_degree(wt)) % 2:
                    acc(wt + ws, c)
                else:
                    acc(wt + ws, -c)
        return out

    def rho(self, word: Word) -> TensorElement:
        """Tensor-algebra expansion of a basis word's bracketing."""
        cached = self._rho_cache.get(word)
        if cached is None:
            if len(word) == 1:
                cached = {word: ONE}
            else:
                left, right = self.split_word(word)
                cached = self.tensor_bracket(self.rho(left), self.rho(right))
            self._rho_cache[word] = cached
        return cached

    def tensor_expand(self, terms: Mapping[Word, Fraction]) -> TensorElement:
        out: TensorElement = {}
        for word, coeff in terms.items():
            for tword, c in self.rho(word).items():
                total = out.get(tword, ZERO) + coeff * c
                if total:
                    out[tword] = total
                else:
                    out.pop(tword, None)
        return out

    def _multiset_data(self, multiset: Word):
        cached = self._multiset_cache.get(multiset)
        if cached is None:
            candidates = sorted(set(permutations(multiset)))
            basis_words = sorted((w for w in candidates if self.is_basis_word(w)),
                                 key=lambda w: (len(w), w))
            expansions = [self.rho(w) for w in basis_words]
            row_words = sorted({tw for exp in expansions for tw in exp})
            row_index = {tw: i for i, tw in enumerate(row_words)}
            columns = [{row_index[tw]: c for tw, c in exp.items()} for exp in expansions]
            matrix = SparseMatrix.from_columns(columns, len(row_words))
            cached = (basis_words, row_index, matrix)
            self._multiset_cache[multiset] = cached
        return cached

    def element_from_tensor(self, tensor: TensorElement) -> "LieElement":
        """Coordinates of a tensor-algebra element in the Lie basis.

        Raises ArithmeticError when the element does not lie in the free Lie
        subalgebra (never silently drops anything).
        """
        groups: dict[Word, TensorElement] = {}
        for tword, coeff in tensor.items():
            if coeff:
                groups.setdefault(tuple(sorted(tword)), {})[tword] = coeff
        terms: dict[Word, Fraction] = {}
        for multiset, part in groups.items():
            basis_words, row_index, matrix = self._multiset_data(multiset)
            rhs = {}
            for tword, coeff in part.items():
                if tword not in row_index:
                    raise ArithmeticError(
                        "tensor element is not in the free Lie subalgebra")
                rhs[row_index[tword]] = coeff
            solution = matrix.solve(rhs)
            if solution is None:
                raise ArithmeticError(
                    "tensor element is not in the free Lie subalgebra")
            for j, coeff in solution.items():
                terms[basis_words[j]] = coeff
        return LieElement(self, terms)

    # -------------------------------------------------------------- operations

    def bracket(self, x: "LieElement", y: "LieElement") -> "LieElement":
        self._check_member(x)
        self._check_member(y)
        product = self.tensor_bracket(self.tensor_expand(x.terms),
                                      self.tensor_expand(y.terms))
        return self.element_from_tensor(product)

    def derive_word(self, word: Word,
                    d_of_letter: Callable[[int], "LieElement"]) -> "LieElement":
        """Extend a map on generators to the basis word as a degree -1
        derivation along the word's canonical bracketing."""
        if len(word) == 1:
            return d_of_letter(word[0])
        left, right = self.split_word(word)
        d_left = self.derive_word(left, d_of_letter)
        d_right = self.derive_word(right, d_of_letter)
        result = self.bracket(d_left, self.word_as_element(right))
        second = self.bracket(self.word_as_element(left), d_right)
        if self.word_degree(left) % 2:
            return result - second
        return result + second

    def _check_member(self, element: "LieElement") -> None:
        if element.algebra is not self:
            raise ValueError("elements belong to different algebras")


class LieElement:
    """A Q-linear combination of normal-form basis words."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: FreeGradedLie, terms: dict[Word, Fraction]):
        self.algebra = algebra
        self.terms = terms

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> Optional[int]:
        """Internal degree when homogeneous (0 reserved for the zero element)."""
        degrees = {self.algebra.word_degree(w) for w in self.terms}
        if not degrees:
            return None
        if len(degrees) > 1:
            raise ValueError("element is not homogeneous")
        return degrees.pop()

    def components(self) -> dict[int, "LieElement"]:
        split: dict[int, dict[Word, Fraction]] = {}
        for word, coeff in self.terms.items():
            split.setdefault(self.algebra.word_degree(word), {})[word] = coeff
        return {d: LieElement(self.algebra, part) for d, part in sorted(split.items())}

    def sorted_terms(self) -> list[tuple[Word, Fraction]]:
        key = lambda item: (self.algebra.word_degree(item[0]), len(item[0]), item[0])
        return sorted(self.terms.items(), key=key)

    # ------------------------------------------------------------- arithmetic

    def _combine(self, other: "LieElement", sign: int) -> "LieElement":
        if other.algebra is not self.algebra:
            raise ValueError("elements belong to different algebras")
        terms = dict(self.terms)
        for word, coeff in other.terms.items():
            total = terms.get(word, ZERO) + sign * coeff
            if total:
                terms[word] = total
            else:
                terms.pop(word, None)
        return LieElement(self.algebra, terms)

    def __add__(self, other: "LieElement") -> "LieElement":
        return self._combine(other, 1)

    def __sub__(self, other: "LieElement") -> "LieElement":
        return self._combine(other, -1)

    def __neg__(self) -> "LieElement":
        return LieElement(self.algebra, {w: -c for w, c in self.terms.items()})

    def scale(self, scalar) -> "LieElement":
        scalar = frac(scalar)
        if not scalar:
            return LieElement(self.algebra, {})
        return LieElement(self.algebra, {w: scalar * c for w, c in self.terms.items()})

    __rmul__ = scale
    __mul__ = scale

    def bracket(self, other: "LieElement") -> "LieElement":
        return self.algebra.bracket(self, other)

    def __eq__(self, other) -> bool:
        return (isinstance(other, LieElement) and other.algebra is self.algebra
                and other.terms == self.terms)

    def __hash__(self):  # elements are used as dict values only
        raise TypeError("LieElement is unhashable")

    def __repr__(self) -> str:
        return self.display()

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


class AbelianLie:
    """A graded Lie algebra with identically zero bracket, spanned by its
    generators.  Mirrors the element interface of the free algebra (words
    are the one-letter tuples) so presentations can wrap either kind."""

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
        self._degrees = tuple(g.degree for g in gens)

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown generator {name!r}") from None

    def degree_of_letter(self, letter: int) -> int:
        return self._degrees[letter]

    def gen(self, name: str) -> LieElement:
        return LieElement(self, {(self.index_of(name),): ONE})

    def zero(self) -> LieElement:
        return LieElement(self, {})

    def word_as_element(self, word: Word) -> LieElement:
        return LieElement(self, {word: ONE})

    def is_basis_word(self, word: Word) -> bool:
        return (isinstance(word, tuple) and len(word) == 1
                and isinstance(word[0], int)
                and 0 <= word[0] < len(self.generators))

    def word_degree(self, word: Word) -> int:
        return self._degrees[word[0]]

    def split_word(self, word: Word):
        return None

    def basis(self, degree: int) -> list[Word]:
        return [(i,) for i, g in enumerate(self.generators)
                if g.degree == degree]

    def dims(self, cap: int) -> list[int]:
        return [len(self.basis(d)) for d in range(1, cap + 1)]

    def display_word(self, word: Word) -> str:
        return self.generators[word[0]].name

    def bracket(self, x: LieElement, y: LieElement) -> LieElement:
        if x.algebra is not self or y.algebra is not self:
            raise ValueError("elements belong to a different algebra")
        return self.zero()

    def derive_word(self, word: Word, d_of_letter) -> LieElement:
        return d_of_letter(word[0])


def free_gla_basis(generators: Sequence[Generator],
                   degree_cap: int) -> dict[int, list[str]]:
    """Basis words (as display strings) of the free graded Lie algebra,
    indexed by internal degree 1..degree_cap."""
    if degree_cap < 1:
        raise ValueError("degree_cap must be >= 1")
    algebra = FreeGradedLie(generators)
    return {d: [algebra.display_word(w) for w in algebra.basis(d)]
            for d in range(1, degree_cap + 1)}
