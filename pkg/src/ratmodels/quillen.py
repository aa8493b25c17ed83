"""The adjoint pair between Lie presentations and coalgebra presentations.

One direction assembles, from a connected free Lie presentation L, the
cocommutative coalgebra on the shifted basis of L (all basis words, one
cogenerator each) with differential d = d' - d'': d' applies the Lie
differential letterwise, d'' contracts two letters to their bracket.  The
other direction builds from a coalgebra presentation the free Lie algebra on
the downward-shifted cogenerators, with the classical cobar differential

    del(s x) = -s(dx) + sum over listed pairs of comultiplication terms.

Comultiplication input is canonicalized: each unordered pair appears once
with its combined coefficient, which absorbs the 1/2 prefactor for distinct
pairs; diagonal pairs keep an explicit 1/2.

The sign rule of d' mixes the position with a degree sum whose reading
(shifted vs unshifted degrees) is fixed by requiring d*d = 0; both readings
are available behind ``convention`` and the consistent one is the default.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .dg import DgPresentation, ValidationIssue, ValidationReport
from .gca import FreeGca, GcaElement
from .lie import FreeGradedLie, Generator, LieElement
from .linalg import ONE, ZERO, SparseMatrix, frac

CONVENTIONS = ("internal", "shifted")
DEFAULT_CE_CONVENTION = "internal"


@dataclass
class UnitReport:
    cap: int
    by_degree: dict[int, dict]
    equal: bool


class CeCoalgebra:
    """Cofree cocommutative coalgebra on the shift of a Lie presentation,
    truncated at a degree cap, with the standard coderivation.

    The underlying graded vector space is the free commutative word algebra
    on one letter per Lie basis word (shifted up by one); the differential is
    *not* a derivation, so this class owns its own matrix machinery.
    """

    def __init__(self, source: DgPresentation, cap: int,
                 convention: str = DEFAULT_CE_CONVENTION):
        if source.flavor != "DGL":
            raise ValueError("the coalgebra construction consumes Lie presentations")
        if convention not in CONVENTIONS:
            raise ValueError(f"unknown convention {convention!r}")
        self.source = source
        self.cap = cap
        self.convention = convention
        self.letter_words: list = []        # Lie basis word per letter
        self.word_letter: dict = {}
        names = []
        for degree in range(1, cap):        # letter degree = degree + 1 <= cap
            for word in source.basis(degree):
                index = len(self.letter_words)
                self.letter_words.append(word)
                self.word_letter[word] = index
                names.append(Generator(f"s{degree}_{index}", degree + 1))
        self.gca = FreeGca(names)
        self._d_cache: dict = {}
        self._matrix_cache: dict[int, SparseMatrix] = {}

    # ------------------------------------------------------------- structure

    def letter_of_word(self, word) -> int:
        return self.word_letter[word]

    def internal_degree(self, letter: int) -> int:
        return self.gca.generators[letter].degree - 1

    def basis(self, degree: int) -> list:
        if degree == 0:
            return [()]
        return [m for m in self.gca.basis(degree)]

    def display_monomial(self, mono) -> str:
        if not mono:
            return "1"
        parts = []
        for letter in mono:
            parts.append("s[" + self.source.algebra.display_word(
                self.letter_words[letter]) + "]")
        return "^".join(parts)

    def _shift_element(self, element: LieElement, prefix: tuple, suffix: tuple,
                       sign: int) -> GcaElement:
        """sign * prefix wedge (sigma of each term of element) wedge suffix.

        The inserted letter sits between prefix and suffix before canonical
        resorting, matching the in-place substitution of the formulas."""
        out = self.gca.zero()
        for word, coeff in element.terms.items():
            letters = prefix + (self.word_letter[word],) + suffix
            sorted_ = self.gca.sort_letters(letters)
            if sorted_ is None:
                continue
            resort, mono = sorted_
            out = out + GcaElement(self.gca, {mono: frac(sign * resort) * coeff})
        return out

    def d_prime(self, mono) -> GcaElement:
        """Letterwise application of the Lie differential."""
        out = self.gca.zero()
        degree_sum = 0
        for i, letter in enumerate(mono):
            word = self.letter_words[letter]
            value = self.source.d_key(word)
            if not value.is_zero():
                exponent = (i + 1) + degree_sum
                sign = -1 if exponent % 2 else 1
                out = out + self._shift_element(value, mono[:i], mono[i + 1:],
                                                sign)
            if self.convention == "shifted":
                degree_sum += self.gca.generators[letter].degree
            else:
                degree_sum += self.internal_degree(letter)
        return out

    def d_second(self, mono) -> GcaElement:
        """Contraction of two letters to their bracket."""
        out = self.gca.zero()
        shifted = [self.gca.generators[letter].degree for letter in mono]
        algebra = self.source.algebra
        for i in range(len(mono)):
            for j in range(i + 1, len(mono)):
                # Koszul sign for pulling letters i then j to the front,
                # computed in shifted degrees
                eps = sum(shifted[k] for k in range(i)) * shifted[i]
                eps += (sum(shifted[k] for k in range(j)) - shifted[i]) * shifted[j]
                internal_sign = self.internal_degree(mono[i])
                exponent = eps + internal_sign
                sign = -1 if exponent % 2 else 1
                bracket = algebra.bracket(
                    algebra.word_as_element(self.letter_words[mono[i]]),
                    algebra.word_as_element(self.letter_words[mono[j]]))
                if bracket.is_zero():
                    continue
                rest = mono[:i] + mono[i + 1:j] + mono[j + 1:]
                out = out + self._shift_element(bracket, (), rest, sign)
        return out

    def d_monomial(self, mono) -> GcaElement:
        if mono not in self._d_cache:
            self._d_cache[mono] = self.d_prime(mono) - self.d_second(mono)
        return self._d_cache[mono]

    def d_element(self, element: GcaElement) -> GcaElement:
        out = self.gca.zero()
        for mono, coeff in element.terms.items():
            out = out + coeff * self.d_monomial(mono)
        return out

    # ------------------------------------------------------- chain complex

    def d_matrix(self, degree: int) -> SparseMatrix:
        if degree not in self._matrix_cache:
            source = self.basis(degree)
            target = {m: i for i, m in enumerate(self.basis(degree - 1))}
            columns = []
            for mono in source:
                value = self.d_monomial(mono)
                columns.append({target[m]: c for m, c in value.terms.items()})
            self._matrix_cache[degree] = SparseMatrix.from_columns(
                columns, len(target))
        return self._matrix_cache[degree]

    def validate(self, cap: Optional[int] = None) -> ValidationReport:
        cap = self.cap if cap is None else min(cap, self.cap)
        issues = []
        for degree in range(0, cap + 1):
            for mono in self.basis(degree):
                twice = self.d_element(self.d_monomial(mono))
                if not twice.is_zero():
                    issues.append(ValidationIssue(
                        "d-squared", self.display_monomial(mono), degree,
                        f"d(d(w)) = {twice.display()}"))
                    break
            if issues:
                break
        return ValidationReport(ok=not issues, cap=cap, issues=issues)

    def homology_dims(self, cap: int) -> list[int]:
        """dim H in degrees 0..cap (needs cap + 1 <= construction cap)."""
        if cap + 1 > self.cap:
            raise ValueError("construction cap too small for this homology cap")
        dims = []
        for degree in range(0, cap + 1):
            cycles = self.d_matrix(degree).kernel_basis()
            boundary_rank = self.d_matrix(degree + 1).rank()
            dims.append(len(cycles) - boundary_rank)
        return dims

    # word-length filtration helpers (assertable invariants)

    def lengths_of(self, element: GcaElement) -> set[int]:
        return {len(m) for m in element.terms}

    # ------------------------------------------------------------- to a DGC

    def as_dgc(self) -> DgPresentation:
        """Repackage the truncation as a coalgebra presentation: one
        cogenerator per word monomial of degree 2..cap, linear differential,
        canonicalized unshuffle comultiplication."""
        monomials = []
        for degree in range(2, self.cap + 1):
            monomials.extend(self.basis(degree))
        name_of = {m: f"m{self.gca.monomial_degree(m)}_{i}"
                   for i, m in enumerate(monomials)}
        gens = [Generator(name_of[m], self.gca.monomial_degree(m))
                for m in monomials]
        differential = {}
        for m in monomials:
            value = self.d_monomial(m)
            terms = {}
            for mono, coeff in value.terms.items():
                if mono not in name_of:
                    raise ArithmeticError("differential left the truncation")
                terms[name_of[mono]] = coeff
            if terms:
                differential[name_of[m]] = terms
        comultiplication = {}
        for m in monomials:
            pairs = self._unshuffles(m)
            listed = []
            for (left, right), coeff in pairs.items():
                if left not in name_of or right not in name_of:
                    continue  # a side of length >= 1 but degree < 2 cannot occur
                listed.append((coeff, name_of[left], name_of[right]))
            if listed:
                comultiplication[name_of[m]] = listed
        return DgPresentation("DGC", gens, differential=differential,
                              comultiplication=comultiplication)

    def _unshuffles(self, mono) -> dict:
        """Reduced comultiplication of one monomial, canonicalized so each
        unordered split is listed once (diagonal splits as-is)."""
        n = len(mono)
        shifted = [self.gca.generators[letter].degree for letter in mono]
        full: dict = {}
        for mask in range(1, (1 << n) - 1):
            left = tuple(mono[k] for k in range(n) if mask >> k & 1)
            right = tuple(mono[k] for k in range(n) if not mask >> k & 1)
            # Koszul sign of the unshuffle: count inversions between the
            # chosen and complementary positions
            exponent = 0
            for k in range(n):
                if mask >> k & 1:
                    continue
                for kk in range(k + 1, n):
                    if mask >> kk & 1:
                        exponent += shifted[k] * shifted[kk]
            sign = -ONE if exponent % 2 else ONE
            key = (left, right)
            full[key] = full.get(key, ZERO) + sign
        canonical: dict = {}
        for (left, right), coeff in full.items():
            if not coeff:
                continue
            if left < right:
                canonical[(left, right)] = coeff
            elif left == right:
                canonical[(left, right)] = coeff
            # right < left: mirror of a pair already listed; dropped
        return canonical


def ce(l: DgPresentation, cap: int,
       convention: str = DEFAULT_CE_CONVENTION) -> CeCoalgebra:
    if any(g.degree < 1 for g in l.generators):
        raise ValueError("unsupported: the Lie presentation must be connected")
    return CeCoalgebra(l, cap, convention)


def cobar(c: DgPresentation, cap: int) -> DgPresentation:
    """Free Lie presentation on the downward shift of a coalgebra.

    Cogenerators above degree cap + 1 are dropped (the formula never maps
    the survivors into them).  The comultiplication table must list each
    unordered pair once.
    """
    if c.flavor != "DGC":
        raise ValueError("cobar consumes coalgebra presentations")
    if any(g.degree < 2 for g in c.generators):
        raise ValueError("unsupported: the coalgebra must be simply connected")
    kept = [g for g in c.generators if g.degree <= cap + 1]
    gens = [Generator(f"s{g.name}", g.degree - 1) for g in kept]
    algebra = FreeGradedLie(gens)
    names = {g.name for g in kept}
    differential: dict[str, LieElement] = {}
    for g in kept:
        value = algebra.zero()
        for tgt, coeff in c.differential.get(g.name, {}).items():
            if tgt in names:
                value = value - coeff * algebra.gen(f"s{tgt}")
        seen = set()
        for coeff, left, right in c.comultiplication.get(g.name, []) if c.comultiplication else []:
            pair = frozenset((left, right))
            if pair in seen and left != right:
                raise ValueError(
                    f"comultiplication of {g.name!r} lists pair "
                    f"({left},{right}) twice; canonicalize the input")
            seen.add(pair)
            if left not in names or right not in names:
                continue
            sign = -ONE if c.degree_of(left) % 2 else ONE
            term = algebra.bracket(algebra.gen(f"s{left}"),
                                   algebra.gen(f"s{right}"))
            if left == right:
                term = term.scale(Fraction(1, 2))
            value = value + (coeff * sign) * term
        if not value.is_zero():
            differential[f"s{g.name}"] = value
    return DgPresentation("DGL", gens, differential, algebra=algebra)


def unit_comparison(l: DgPresentation, cap: int) -> UnitReport:
    """Homology dimensions of a Lie presentation against the round trip
    through the adjoint pair, in degrees 1..cap."""
    source_dims = l.homology(cap).dims()
    coalgebra = ce(l, cap + 2)
    round_trip = cobar(coalgebra.as_dgc(), cap + 1)
    trip_dims = round_trip.homology(cap).dims()
    by_degree = {}
    equal = True
    for degree in range(1, cap + 1):
        s = source_dims[degree - 1]
        t = trip_dims[degree - 1]
        by_degree[degree] = {"source": s, "round_trip": t, "equal": s == t}
        equal = equal and s == t
    return UnitReport(cap=cap, by_degree=by_degree, equal=equal)
