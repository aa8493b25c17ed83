"""Differential graded presentations: validation, homology, morphisms.

Four flavors share one interface:

* ``DGL``  -- free graded Lie algebra, differential of degree -1;
* ``DGA``  -- free graded-commutative algebra, differential of degree +1;
* ``DGN``  -- free anticommutative non-associative algebra with lambda
  generators, differential of degree -1;
* ``DGC``  -- a *finite-dimensional* cocommutative coalgebra given by
  cogenerators, a linear differential of degree -1 and a reduced
  comultiplication table (the underlying space is the span of the
  cogenerators; nothing is free here).

Everything is degree-capped: the free flavors are infinite dimensional, so
every question is asked per internal degree up to an explicit cap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence, Union

from .gca import FreeGca, GcaElement
from .lie import FreeGradedLie, Generator, LieElement
from .linalg import ONE, ZERO, SparseMatrix, frac, quotient_representatives
from .nonassoc import NaAlgebra, NaElement

FLAVORS = ("DGL", "DGA", "DGC", "DGN")

Element = Union[LieElement, GcaElement, NaElement, dict]


def free_algebra(flavor: str, generators: Sequence[Generator]):
    if flavor == "DGL":
        return FreeGradedLie(generators)
    if flavor == "DGA":
        return FreeGca(generators)
    if flavor == "DGN":
        return NaAlgebra(generators)
    if flavor == "DGC":
        return None
    raise ValueError(f"unknown flavor {flavor!r}")


@dataclass
class ValidationIssue:
    kind: str          # "degree" | "d-squared" | "structure"
    where: str         # generator or basis word display
    degree: Optional[int]
    detail: str

    def as_dict(self) -> dict:
        return {"kind": self.kind, "where": self.where,
                "degree": self.degree, "detail": self.detail}


@dataclass
class ValidationReport:
    ok: bool
    cap: int
    issues: list[ValidationIssue] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"ok": self.ok, "cap": self.cap,
                "issues": [i.as_dict() for i in self.issues]}


@dataclass
class DegreeHomology:
    degree: int
    dim: int
    cycle_rank: int
    boundary_rank: int
    representatives: list  # elements (or coordinate dicts for DGC)


@dataclass
class HomologyReport:
    flavor: str
    cap: int
    by_degree: dict[int, DegreeHomology]

    def dims(self) -> list[int]:
        return [self.by_degree[d].dim for d in range(1, self.cap + 1)]


@dataclass
class HomologyClass:
    """[z] expressed over the canonical homology basis of its degree."""
    status: str  # "class" | "boundary" | "not-a-cycle"
    degree: Optional[int]
    coefficients: tuple[Fraction, ...] = ()

    @property
    def is_zero(self) -> bool:
        return self.status == "boundary"


class DgPresentation:
    """A free DG object presented by generators and their differentials.

    ``differential`` maps generator names to elements of ``algebra`` (missing
    names mean zero).  For DGC flavor the values are coordinate dicts
    ``{cogenerator name: scalar}`` and ``comultiplication`` holds the reduced
    diagonal as ``{name: [(coeff, left name, right name), ...]}`` with each
    unordered pair listed once.
    """

    def __init__(self, flavor: str, generators: Sequence[Generator],
                 differential: Optional[Mapping[str, Element]] = None,
                 connectivity: str = "connected",
                 comultiplication: Optional[Mapping[str, list]] = None,
                 algebra=None):
        if flavor not in FLAVORS:
            raise ValueError(f"unknown flavor {flavor!r}")
        self.flavor = flavor
        self.generators = tuple(generators)
        self.connectivity = connectivity
        self._gen_degree = {g.name: g.degree for g in self.generators}
        if len(self._gen_degree) != len(self.generators):
            raise ValueError("duplicate generator names")
        differential = dict(differential or {})
        for name in differential:
            if name not in self._gen_degree:
                raise ValueError(f"differential given for unknown generator {name!r}")

        if flavor == "DGC":
            self.algebra = None
            self.differential = {n: dict(v) for n, v in differential.items()}
            self.comultiplication = {n: list(v) for n, v in (comultiplication or {}).items()}
            for name, pairs in self.comultiplication.items():
                if name not in self._gen_degree:
                    raise ValueError(f"comultiplication for unknown cogenerator {name!r}")
                for _, left, right in pairs:
                    if left not in self._gen_degree or right not in self._gen_degree:
                        raise ValueError("comultiplication refers to unknown cogenerator")
        else:
            if comultiplication:
                raise ValueError("comultiplication only makes sense for DGC flavor")
            provided = [v for v in differential.values() if not isinstance(v, dict)]
            if algebra is None:
                algebra = provided[0].algebra if provided else free_algebra(flavor, generators)
            self.algebra = algebra
            if tuple(self.algebra.generators) != self.generators:
                raise ValueError("algebra generators do not match the presentation")
            for name, value in differential.items():
                if value.algebra is not self.algebra:
                    raise ValueError(f"differential of {name!r} lives in a foreign algebra")
            self.differential = differential
            self.comultiplication = None
        self.d_degree = +1 if flavor == "DGA" else -1
        self._d_word_cache: dict = {}
        self._matrix_cache: dict[int, SparseMatrix] = {}
        self._homology_cache: dict[int, DegreeHomology] = {}

    # ----------------------------------------------------------------- basics

    @property
    def gen_names(self) -> list[str]:
        return [g.name for g in self.generators]

    def degree_of(self, name: str) -> int:
        return self._gen_degree[name]

    def zero(self):
        if self.flavor == "DGC":
            return {}
        return self.algebra.zero()

    def d_of_gen(self, name: str):
        if name not in self._gen_degree:
            raise KeyError(f"unknown generator {name!r}")
        value = self.differential.get(name)
        if value is None:
            return self.zero()
        return value

    # --------------------------------------------------------- chain complex

    def basis(self, degree: int) -> list:
        """Canonical basis keys of the underlying space in one degree."""
        if self.flavor == "DGC":
            return [g.name for g in self.generators if g.degree == degree]
        return list(self.algebra.basis(degree))

    def display_key(self, key) -> str:
        if self.flavor == "DGC":
            return key
        if self.flavor == "DGA":
            return self.algebra.display_monomial(key)
        return self.algebra.display_word(key)

    def element_from_vector(self, degree: int, vector: Mapping[int, Fraction]):
        keys = self.basis(degree)
        if self.flavor == "DGC":
            return {keys[i]: frac(c) for i, c in vector.items() if c}
        terms = {keys[i]: frac(c) for i, c in vector.items() if c}
        if self.flavor == "DGA":
            return GcaElement(self.algebra, terms)
        if self.flavor == "DGL":
            return LieElement(self.algebra, terms)
        return NaElement(self.algebra, terms)

    def vector_of(self, element, degree: int) -> dict[int, Fraction]:
        keys = {k: i for i, k in enumerate(self.basis(degree))}
        terms = element.items() if isinstance(element, dict) else element.terms.items()
        out = {}
        for key, coeff in terms:
            if key not in keys:
                raise ValueError(
                    f"element term {self.display_key(key)} is not in degree {degree}")
            if coeff:
                out[keys[key]] = coeff
        return out

    def d_key(self, key):
        """Differential of one basis key, as an element."""
        cached = self._d_word_cache.get(key)
        if cached is not None:
            return cached
        if self.flavor == "DGC":
            value = self.differential.get(key, {})
        elif self.flavor == "DGL":
            value = self.algebra.derive_word(
                key, lambda letter: self.d_of_gen(self.algebra.generators[letter].name))
        elif self.flavor == "DGA":
            value = self.algebra.derive_monomial(
                key, lambda letter: self.d_of_gen(self.algebra.generators[letter].name))
        else:
            value = self.algebra.d_element(
                self.algebra.word_as_element(key),
                lambda letter: self.d_of_gen(self.algebra.generators[letter].name))
        self._d_word_cache[key] = value
        return value

    def d_element(self, element):
        if self.flavor == "DGC":
            out: dict[str, Fraction] = {}
            for name, coeff in element.items():
                for tgt, c in self.differential.get(name, {}).items():
                    total = out.get(tgt, ZERO) + coeff * c
                    if total:
                        out[tgt] = total
                    else:
                        out.pop(tgt, None)
            return out
        out = self.algebra.zero()
        for key, coeff in element.terms.items():
            out = out + coeff * self.d_key(key)
        return out

    def d_matrix(self, degree: int) -> SparseMatrix:
        """Matrix of d from degree to degree + d_degree over canonical bases."""
        if degree not in self._matrix_cache:
            source = self.basis(degree)
            target_degree = degree + self.d_degree
            columns = []
            for key in source:
                value = self.d_key(key)
                columns.append(self.vector_of(value, target_degree)
                               if (value if isinstance(value, dict) else value.terms)
                               else {})
            self._matrix_cache[degree] = SparseMatrix.from_columns(
                columns, len(self.basis(target_degree)))
        return self._matrix_cache[degree]

    # -------------------------------------------------------------- validate

    def validate(self, cap: int) -> ValidationReport:
        """Degree checks on generator differentials, flavor constraints, and
        d(d(w)) = 0 for every basis word of degree <= cap."""
        issues: list[ValidationIssue] = []
        if self.flavor == "DGA" and self.connectivity == "simply-connected":
            for g in self.generators:
                if g.degree < 2:
                    issues.append(ValidationIssue(
                        "structure", g.name, g.degree,
                        "simply-connected DGA requires generators in degrees >= 2"))
        for name in sorted(self.differential, key=self.gen_names.index):
            value = self.differential[name]
            terms = value if isinstance(value, dict) else value.terms
            if not terms:
                continue
            expected = self._gen_degree[name] + self.d_degree
            if self.flavor == "DGC":
                degrees = {self._gen_degree[t] for t in terms}
            else:
                degrees = {self._value_degree_of_key(k) for k in terms}
            if degrees != {expected}:
                issues.append(ValidationIssue(
                    "degree", name, self._gen_degree[name],
                    f"d({name}) has degrees {sorted(degrees)}, expected {expected}"))
        if self.flavor == "DGC":
            issues.extend(self._validate_coalgebra())
        if not issues:
            lower = 0 if self.flavor == "DGA" else 1
            for degree in range(lower, cap + 1):
                for key in self.basis(degree):
                    once = self.d_key(key)
                    twice = self.d_element(once)
                    nonzero = twice if isinstance(twice, dict) else twice.terms
                    if nonzero:
                        issues.append(ValidationIssue(
                            "d-squared", self.display_key(key), degree,
                            f"d(d(w)) = {self._display(twice)}"))
                        break
                if issues:
                    break
        return ValidationReport(ok=not issues, cap=cap, issues=issues)

    def _value_degree_of_key(self, key) -> int:
        if self.flavor == "DGA":
            return self.algebra.monomial_degree(key)
        return self.algebra.word_degree(key)

    def _display(self, element) -> str:
        if isinstance(element, dict):
            if not element:
                return "0"
            parts = [f"{c}*{n}" for n, c in sorted(element.items())]
            return " + ".join(parts)
        return element.display()

    def _validate_coalgebra(self) -> list[ValidationIssue]:
        issues = []
        for name, pairs in (self.comultiplication or {}).items():
            total = self._gen_degree[name]
            for coeff, left, right in pairs:
                if self._gen_degree[left] + self._gen_degree[right] != total:
                    issues.append(ValidationIssue(
                        "degree", name, total,
                        f"comultiplication pair ({left},{right}) has wrong degree"))
        return issues

    # -------------------------------------------------------------- homology

    def _degree_homology(self, degree: int) -> DegreeHomology:
        if degree in self._homology_cache:
            return self._homology_cache[degree]
        outgoing = self.d_matrix(degree)
        incoming_degree = degree - self.d_degree
        incoming = self.d_matrix(incoming_degree)
        kernel = outgoing.kernel_basis()
        boundary_rank = incoming.rank()
        dim = len(kernel) - boundary_rank
        n = len(self.basis(degree))
        boundary_columns: dict[int, dict[int, Fraction]] = {}
        for (i, j), value in incoming.entries.items():
            boundary_columns.setdefault(j, {})[i] = value
        rep_rows = quotient_representatives(kernel, list(boundary_columns.values()), n)
        representatives = [self.element_from_vector(degree, row) for row in rep_rows]
        result = DegreeHomology(degree=degree, dim=dim,
                                cycle_rank=len(kernel),
                                boundary_rank=boundary_rank,
                                representatives=representatives)
        if len(representatives) != dim:
            # boundaries escaping the cycle space: d*d != 0 somewhere
            raise ArithmeticError(
                f"homology bookkeeping failed in degree {degree}: the image "
                "of d is not contained in the kernel of d (run validate)")
        self._homology_cache[degree] = result
        return result

    def homology(self, cap: int) -> HomologyReport:
        lower = 0 if self.flavor == "DGA" else 1
        report = {}
        for degree in range(lower, cap + 1):
            report[degree] = self._degree_homology(degree)
        return HomologyReport(flavor=self.flavor, cap=cap, by_degree=report)

    def homology_class_of(self, element, cap: int) -> HomologyClass:
        terms = element if isinstance(element, dict) else element.terms
        if not terms:
            return HomologyClass(status="boundary", degree=None)
        if self.flavor == "DGC":
            degrees = {self._gen_degree[k] for k in terms}
        else:
            degrees = {self._value_degree_of_key(k) for k in terms}
        if len(degrees) != 1:
            raise ValueError("element is not homogeneous")
        degree = degrees.pop()
        if degree > cap:
            raise ValueError(f"degree {degree} exceeds cap {cap}")
        image = self.d_element(element)
        if (image if isinstance(image, dict) else image.terms):
            return HomologyClass(status="not-a-cycle", degree=degree)
        data = self._degree_homology(degree)
        incoming = self.d_matrix(degree - self.d_degree)
        n = len(self.basis(degree))
        columns = []
        for j in range(incoming.cols):
            columns.append({i: v for (i, jj), v in incoming.entries.items() if jj == j})
        rep_columns = [self.vector_of(rep, degree) for rep in data.representatives]
        matrix = SparseMatrix.from_columns(columns + rep_columns, n)
        solution = matrix.solve(self.vector_of(element, degree))
        if solution is None:
            raise ArithmeticError("cycle failed to decompose; homology bug")
        coeffs = tuple(solution.get(incoming.cols + i, ZERO)
                       for i in range(len(rep_columns)))
        if any(coeffs):
            return HomologyClass(status="class", degree=degree, coefficients=coeffs)
        return HomologyClass(status="boundary", degree=degree)


# ------------------------------------------------------------------ morphisms

class DgMorphism:
    """A morphism of presentations, given by generator values in the target."""

    def __init__(self, source: DgPresentation, target: DgPresentation,
                 values: Mapping[str, Element]):
        if source.flavor != target.flavor:
            raise ValueError("morphism between different flavors")
        if source.flavor == "DGC":
            raise ValueError("DGC morphisms are not supported")
        self.source = source
        self.target = target
        self.values = dict(values)
        for name in self.values:
            source.degree_of(name)  # raises on unknown
        self._word_cache: dict = {}

    def value_of(self, name: str):
        return self.values.get(name, self.target.zero())

    def apply_key(self, key):
        cached = self._word_cache.get(key)
        if cached is not None:
            return cached
        src, tgt = self.source.algebra, self.target.algebra
        if self.source.flavor == "DGL":
            split = src.split_word(key)
            if split is None:
                value = self.value_of(src.generators[key[0]].name)
            else:
                left, right = split
                value = tgt.bracket(self.apply_key(left), self.apply_key(right))
        elif self.source.flavor == "DGA":
            value = tgt.one()
            for letter in key:
                value = value * self.value_of(src.generators[letter].name)
        else:  # DGN
            tag = key[0]
            if tag == "g":
                value = self.value_of(src.generators[key[1]].name)
            elif tag == "p":
                value = tgt.bracket(self.apply_key(key[1]), self.apply_key(key[2]))
            else:
                value = tgt.lam(key[1], [self.apply_key(a) for a in key[2]])
        self._word_cache[key] = value
        return value

    def apply(self, element):
        out = self.target.zero()
        for key, coeff in element.terms.items():
            out = out + coeff * self.apply_key(key)
        return out

    def check(self) -> list[str]:
        """Degree preservation and d-compatibility on every generator."""
        problems = []
        for g in self.source.generators:
            value = self.value_of(g.name)
            if not value.is_zero():
                try:
                    if value.degree() != g.degree:
                        problems.append(
                            f"f({g.name}) has degree {value.degree()}, expected {g.degree}")
                except ValueError:
                    problems.append(f"f({g.name}) is not homogeneous")
        for g in self.source.generators:
            lhs = self.apply(self.source.d_of_gen(g.name))
            rhs = self.target.d_element(self.value_of(g.name))
            if lhs != rhs:
                problems.append(
                    f"d f({g.name}) != f d({g.name}): "
                    f"{rhs.display()} vs {lhs.display()}")
        return problems

    def matrix(self, degree: int) -> SparseMatrix:
        source_basis = self.source.basis(degree)
        columns = [self.target.vector_of(self.apply_key(k), degree)
                   if not self.apply_key(k).is_zero() else {}
                   for k in source_basis]
        return SparseMatrix.from_columns(columns, len(self.target.basis(degree)))

    def is_quasi_iso(self, cap: int) -> tuple[bool, dict[int, dict]]:
        """H_n(f) bijective for every n <= cap?  Also returns per-degree data."""
        report: dict[int, dict] = {}
        ok = True
        lower = 0 if self.source.flavor == "DGA" else 1
        for degree in range(lower, cap + 1):
            src_h = self.source._degree_homology(degree)
            tgt_h = self.target._degree_homology(degree)
            # transport source representatives and read off their classes
            image_classes = []
            for rep in src_h.representatives:
                cls = self.target.homology_class_of(self.apply(rep), cap=degree)
                if cls.status == "not-a-cycle":
                    raise ArithmeticError("morphism does not send cycles to cycles")
                coeffs = cls.coefficients or (ZERO,) * tgt_h.dim
                image_classes.append({i: c for i, c in enumerate(coeffs) if c})
            rank = SparseMatrix.from_columns(image_classes, tgt_h.dim).rank()
            iso = (rank == src_h.dim == tgt_h.dim)
            report[degree] = {"source_dim": src_h.dim, "target_dim": tgt_h.dim,
                              "rank": rank, "iso": iso}
            ok = ok and iso
        return ok, report


# --------------------------------------------------------------- sphere/disk

@dataclass(frozen=True)
class SphereDisk:
    kind: str          # "sphere" | "disk"
    dimension: int
    generator: str
    boundary: Optional[str] = None

    def presentation(self) -> DgPresentation:
        if self.kind == "sphere":
            gens = [Generator(self.generator, self.dimension)]
            return DgPresentation("DGL", gens)
        if self.kind == "disk":
            if self.dimension < 2:
                raise ValueError("disk dimension must be >= 2 so the boundary has degree >= 1")
            boundary = self.boundary or f"d{self.generator}"
            gens = [Generator(self.generator, self.dimension),
                    Generator(boundary, self.dimension - 1)]
            algebra = FreeGradedLie(gens)
            return DgPresentation("DGL", gens,
                                  {self.generator: algebra.gen(boundary)},
                                  algebra=algebra)
        raise ValueError(f"unknown kind {self.kind!r}")


def sphere(dimension: int, name: str = "x") -> DgPresentation:
    return SphereDisk("sphere", dimension, name).presentation()


def disk(dimension: int, name: str = "x", boundary: Optional[str] = None) -> DgPresentation:
    return SphereDisk("disk", dimension, name, boundary).presentation()


def validate(p: DgPresentation, cap: int) -> ValidationReport:
    return p.validate(cap)


def homology(p: DgPresentation, cap: int) -> HomologyReport:
    return p.homology(cap)


def homology_class_of(p: DgPresentation, element, cap: int) -> HomologyClass:
    return p.homology_class_of(element, cap)


def is_quasi_iso(f: DgMorphism, cap: int) -> tuple[bool, dict[int, dict]]:
    return f.is_quasi_iso(cap)
