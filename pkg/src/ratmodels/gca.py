"""Free graded-commutative algebras over Q.

Monomials are stored as tuples of generator indices sorted by ``(degree,
name)``, with the Koszul sign of the sorting permutation folded into the
coefficient.  An odd generator appearing twice kills the monomial; even
generators may repeat freely.  The empty tuple is the unit.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence

from .lie import Generator
from .linalg import ONE, ZERO, frac

Monomial = tuple[int, ...]


class FreeGca:
    """The free graded-commutative algebra Lambda(V) on ordered generators."""

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
        # canonical letter order: by (degree, name); ties impossible
        self._sort_key = tuple((g.degree, g.name) for g in gens)
        self._basis_cache: dict[int, tuple[Monomial, ...]] = {}

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown generator {name!r}") from None

    def degree_of_letter(self, letter: int) -> int:
        return self._degrees[letter]

    def monomial_degree(self, monomial: Monomial) -> int:
        return sum(self._degrees[i] for i in monomial)

    # --------------------------------------------------------- normalization

    def sort_letters(self, letters: Sequence[int]) -> Optional[tuple[int, Monomial]]:
        """Sort letters into canonical order; returns (koszul sign, monomial)
        or None when a repeated odd letter kills the product."""
        items = list(letters)
        sign = 1
        # insertion sort, tracking the Koszul sign of each adjacent swap
        for i in range(1, len(items)):
            j = i
            while j > 0 and self._sort_key[items[j - 1]] > self._sort_key[items[j]]:
                if (self._degrees[items[j - 1]] * self._degrees[items[j]]) % 2:
                    sign = -sign
                items[j - 1], items[j] = items[j], items[j - 1]
                j -= 1
        for a, b in zip(items, items[1:]):
            if a == b and self._degrees[a] % 2:
                return None
        return sign, tuple(items)

    # -------------------------------------------------------------- elements

    def zero(self) -> "GcaElement":
        return GcaElement(self, {})

    def one(self) -> "GcaElement":
        return GcaElement(self, {(): ONE})

    def gen(self, name: str) -> "GcaElement":
        return GcaElement(self, {(self.index_of(name),): ONE})

    def monomial(self, letters: Sequence[int], coeff=ONE) -> "GcaElement":
        sorted_ = self.sort_letters(letters)
        coeff = frac(coeff)
        if sorted_ is None or not coeff:
            return self.zero()
        sign, mono = sorted_
        return GcaElement(self, {mono: sign * coeff})

    def from_terms(self, terms: Mapping[Monomial, Fraction]) -> "GcaElement":
        out = self.zero()
        for mono, coeff in terms.items():
            out = out + self.monomial(mono, coeff)
        return out

    # ----------------------------------------------------------------- basis

    def basis(self, degree: int) -> tuple[Monomial, ...]:
        """All canonical monomials of one total degree (degree 0: the unit)."""
        if degree < 0:
            return ()
        if degree not in self._basis_cache:
            order = sorted(range(len(self.generators)),
                           key=lambda i: self._sort_key[i])
            found: list[Monomial] = []

            def extend(prefix: list[int], position: int, remaining: int) -> None:
                if remaining == 0:
                    found.append(tuple(prefix))
                    return
                for idx in range(position, len(order)):
                    letter = order[idx]
                    d = self._degrees[letter]
                    if d > remaining:
                        continue
                    if self._degrees[letter] % 2:
                        prefix.append(letter)
                        extend(prefix, idx + 1, remaining - d)
                        prefix.pop()
                    else:
                        prefix.append(letter)
                        extend(prefix, idx, remaining - d)
                        prefix.pop()

            extend([], 0, degree)
            found.sort(key=lambda m: (len(m), tuple(self._sort_key[i] for i in m)))
            self._basis_cache[degree] = tuple(found)
        return self._basis_cache[degree]

    def dims(self, cap: int) -> list[int]:
        return [len(self.basis(d)) for d in range(1, cap + 1)]

    # ------------------------------------------------------------ derivation

    def derive_monomial(self, monomial: Monomial,
                        d_of_letter: Callable[[int], "GcaElement"],
                        derivation_degree: int = 1) -> "GcaElement":
        """Extend a generator map to the monomial by the graded Leibniz rule
        d(g1...gk) = sum_i (-1)^{(|g1...g_{i-1}|)*|d|} g1...d(gi)...gk."""
        out = self.zero()
        prefix_degree = 0
        for i, letter in enumerate(monomial):
            part = d_of_letter(letter)
            if not part.is_zero():
                sign = -1 if (prefix_degree * derivation_degree) % 2 else 1
                left = GcaElement(self, {monomial[:i]: frac(sign)})
                right = GcaElement(self, {monomial[i + 1:]: ONE})
                out = out + left * part * right
            prefix_degree += self._degrees[letter]
        return out

    def display_monomial(self, monomial: Monomial) -> str:
        if not monomial:
            return "1"
        return "*".join(self.generators[i].name for i in monomial)


class GcaElement:
    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: FreeGca, terms: dict[Monomial, Fraction]):
        self.algebra = algebra
        self.terms = terms

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> Optional[int]:
        degrees = {self.algebra.monomial_degree(m) for m in self.terms}
        if not degrees:
            return None
        if len(degrees) > 1:
            raise ValueError("element is not homogeneous")
        return degrees.pop()

    def _combine(self, other: "GcaElement", sign: int) -> "GcaElement":
        if other.algebra is not self.algebra:
            raise ValueError("elements belong to different algebras")
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            total = terms.get(mono, ZERO) + sign * coeff
            if total:
                terms[mono] = total
            else:
                terms.pop(mono, None)
        return GcaElement(self.algebra, terms)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return GcaElement(self.algebra, {m: -c for m, c in self.terms.items()})

    def scale(self, scalar) -> "GcaElement":
        scalar = frac(scalar)
        if not scalar:
            return GcaElement(self.algebra, {})
        return GcaElement(self.algebra, {m: scalar * c for m, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, GcaElement):
            return self.scale(other)
        if other.algebra is not self.algebra:
            raise ValueError("elements belong to different algebras")
        alg = self.algebra
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                sorted_ = alg.sort_letters(m1 + m2)
                if sorted_ is None:
                    continue
                sign, mono = sorted_
                total = out.get(mono, ZERO) + sign * c1 * c2
                if total:
                    out[mono] = total
                else:
                    out.pop(mono, None)
        return GcaElement(alg, out)

    __rmul__ = scale

    def __eq__(self, other):
        return (isinstance(other, GcaElement) and other.algebra is self.algebra
                and other.terms == self.terms)

    def __hash__(self):
        raise TypeError("GcaElement is unhashable")

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        key = lambda item: (self.algebra.monomial_degree(item[0]), len(item[0]), item[0])
        return sorted(self.terms.items(), key=key)

    def display(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, coeff in self.sorted_terms():
            text = self.algebra.display_monomial(mono)
            if coeff == 1:
                term = text
            elif coeff == -1:
                term = f"-{text}"
            else:
                term = f"{coeff}*{text}" if mono else f"{coeff}"
            parts.append(term)
        out = parts[0]
        for term in parts[1:]:
            out += f" - {term[1:]}" if term.startswith("-") else f" + {term}"
        return out

    def __repr__(self):
        return self.display()


def gca_multiply(x: GcaElement, y: GcaElement) -> GcaElement:
    return x * y
