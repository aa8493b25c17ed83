"""Minimal, bigraded and filtered models, with a capped formality test.

The central objects:

* ``bigraded_model`` resolves a graded (Lie) algebra H by a free DG object
  whose generators carry a second, homological degree; the differential
  lowers it by one and the homology is H again, concentrated in homological
  degree 0.
* ``filtered_model`` perturbs a bigraded model so that it becomes
  quasi-isomorphic to a given non-formal target, the perturbation dropping
  homological degree by at least two.
* ``perturbation_system`` writes out the quadratic equations that cut out
  all admissible perturbations of a bigraded model, truncated at a degree
  cap, as an explicit polynomial system over Q.
* ``is_formal_up_to`` decides (three-valued: yes / no / inconclusive up to
  the budget) whether a presentation can be compared with the zero
  perturbation in degrees <= cap.

Everything is exact and deterministic: all choices are normalized against
canonical echelon bases.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Mapping, Optional

from .dg import DgMorphism, DgPresentation, free_algebra
from .gca import FreeGca, GcaElement
from .lie import FreeGradedLie, Generator, LieElement
from .linalg import ONE, ZERO, SparseMatrix, frac, quotient_representatives

FORMAL_BUDGET_ENV = "RATMODELS_FORMAL_BUDGET"
DEFAULT_FORMAL_BUDGET = 20000


# ---------------------------------------------------------------- primitives

def normalize_primitive(element):
    """Scale so coefficients are coprime integers with positive leading one.

    The leading term is the first in the canonical basis order of the
    element's degree.  Returns the element unchanged if zero.
    """
    if element.is_zero():
        return element
    terms = element.sorted_terms()
    denominator_lcm = 1
    numerator_gcd = 0
    for _, coeff in terms:
        denominator_lcm = denominator_lcm * coeff.denominator // gcd(
            denominator_lcm, coeff.denominator)
        numerator_gcd = gcd(numerator_gcd, coeff.numerator)
    scale = Fraction(denominator_lcm, numerator_gcd)
    if terms[0][1] * scale < 0:
        scale = -scale
    return element.scale(scale)


def substitute(element, values: Mapping[str, object], target_algebra):
    """Extend a generator assignment to an algebra morphism and apply it.

    Works for both flavors: brackets are re-expanded along each basis word's
    canonical bracketing, monomials as products.  ``values`` must cover every
    generator that actually occurs.
    """
    source = element.algebra
    cache: dict = {}

    def value_of(letter: int):
        name = source.generators[letter].name
        try:
            return values[name]
        except KeyError:
            raise KeyError(f"no substitution value for generator {name!r}")

    if isinstance(element, LieElement):
        def eval_word(word):
            if word not in cache:
                if len(word) == 1:
                    cache[word] = value_of(word[0])
                else:
                    left, right = source.split_word(word)
                    cache[word] = target_algebra.bracket(
                        eval_word(left), eval_word(right))
            return cache[word]
    else:
        def eval_word(word):
            if word not in cache:
                out = target_algebra.one()
                for letter in word:
                    out = out * value_of(letter)
                cache[word] = out
            return cache[word]

    out = target_algebra.zero()
    for word, coeff in element.terms.items():
        out = out + coeff * eval_word(word)
    return out


# -------------------------------------------------- graded algebra input type

@dataclass
class GradedAlgebraPresentation:
    """Generators and relations of a graded (Lie) algebra, no differential.

    ``flavor`` is "GLA" (graded Lie) or "GCA" (graded commutative).
    ``relations`` are elements of the free algebra on the generators.
    ``class_reps`` optionally records, for each generator, a cycle in some
    ambient presentation whose homology class realizes it (filled in by
    ``present_homology``).
    """
    flavor: str
    generators: tuple[Generator, ...]
    relations: list = field(default_factory=list)
    algebra: object = None
    class_reps: Optional[dict] = None

    def __post_init__(self):
        if self.flavor not in ("GLA", "GCA"):
            raise ValueError(f"unknown flavor {self.flavor!r}")
        self.generators = tuple(self.generators)
        if self.algebra is None:
            self.algebra = (FreeGradedLie(self.generators) if self.flavor == "GLA"
                            else FreeGca(self.generators))
        for r in self.relations:
            if r.algebra is not self.algebra:
                raise ValueError("relation lives in a foreign algebra")
            if r.is_zero() or r.degree() is None:
                raise ValueError("relations must be nonzero and homogeneous")

    @property
    def model_flavor(self) -> str:
        return "DGL" if self.flavor == "GLA" else "DGA"


def _ideal_span_vectors(presentation: GradedAlgebraPresentation,
                        seeds, degree: int) -> list[dict[int, Fraction]]:
    """Coordinate vectors, in the canonical basis of one degree, spanning the
    degree-d piece of the (two-sided, Leibniz-closed) ideal generated by
    ``seeds``.  Closing under multiplication by generators reaches the whole
    ideal in either flavor."""
    algebra = presentation.algebra
    by_degree: dict[int, list] = {}
    for s in seeds:
        by_degree.setdefault(s.degree(), []).append(s)
    for d in range(1, degree + 1):
        for g in presentation.generators:
            lower = d - g.degree
            if lower in by_degree:
                for e in by_degree[lower]:
                    if presentation.flavor == "GLA":
                        product = e.bracket(algebra.gen(g.name))
                    else:
                        product = e * algebra.gen(g.name)
                    if not product.is_zero():
                        by_degree.setdefault(d, []).append(product)
    index = {w: i for i, w in enumerate(algebra.basis(degree))}
    return [{index[w]: c for w, c in e.terms.items()}
            for e in by_degree.get(degree, [])]


# ------------------------------------------------------------ bigraded model

@dataclass
class BigradedModel:
    underlying: DgPresentation
    bidegrees: dict[str, tuple[int, int]]   # name -> (internal, homological)
    input_presentation: GradedAlgebraPresentation
    cap: int

    @property
    def flavor(self) -> str:
        return self.underlying.flavor

    def hom_degree_of_word(self, key) -> int:
        gens = self.underlying.generators
        return sum(self.bidegrees[gens[letter].name][1] for letter in key)

    def generators_of_stage(self, stage: int) -> list[str]:
        return [name for name, (_, n) in self.bidegrees.items() if n == stage]

    def block_basis(self, internal: int, hom: int) -> list:
        return [k for k in self.underlying.basis(internal)
                if self.hom_degree_of_word(k) == hom]

    def block_matrix(self, internal: int, hom: int) -> SparseMatrix:
        """Differential restricted to the (internal, hom) bihomogeneous block."""
        p = self.underlying
        source = self.block_basis(internal, hom)
        target = self.block_basis(internal + p.d_degree, hom - 1)
        index = {k: i for i, k in enumerate(target)}
        columns = []
        for key in source:
            value = p.d_key(key)
            columns.append({index[w]: c for w, c in value.terms.items()} if
                           not value.is_zero() else {})
        return SparseMatrix.from_columns(columns, len(target))

    def block_homology(self, internal: int, hom: int):
        """(dimension, canonical representative elements) of one block."""
        p = self.underlying
        cycles = self.block_matrix(internal, hom).kernel_basis()
        incoming = self.block_matrix(internal - p.d_degree, hom + 1)
        boundaries: dict[int, dict[int, Fraction]] = {}
        for (i, j), v in incoming.entries.items():
            boundaries.setdefault(j, {})[i] = v
        block = self.block_basis(internal, hom)
        rows = quotient_representatives(cycles, list(boundaries.values()),
                                        len(block))
        reps = []
        for row in rows:
            terms = {block[i]: c for i, c in row.items()}
            reps.append(type(p.zero())(p.algebra, terms))
        return len(rows), reps

    def validate(self, cap: Optional[int] = None):
        return self.underlying.validate(cap if cap is not None else self.cap)


def _fresh_name(base: str, taken: set) -> str:
    name = base
    suffix = 0
    while name in taken:
        suffix += 1
        name = f"{base}_{suffix}"
    taken.add(name)
    return name


def bigraded_model(h: GradedAlgebraPresentation, cap: int) -> BigradedModel:
    """Free bigraded resolution of a graded (Lie) algebra, truncated at cap.

    Stage 0 repeats the algebra generators; stage 1 attaches one generator
    per independent relation; stage n >= 2 kills the homology left in
    homological degree n-1, internal degrees within the cap.  All attaching
    values are canonical-echelon representatives scaled to primitive integer
    vectors with positive leading coefficient.
    """
    flavor = h.model_flavor
    if flavor == "DGA":
        if any(g.degree < 2 for g in h.generators):
            raise ValueError("commutative-flavor input must be simply connected")
    gens: list[Generator] = list(h.generators)
    taken = {g.name for g in gens}
    bidegrees: dict[str, tuple[int, int]] = {g.name: (g.degree, 0) for g in gens}
    # differential values recorded as elements of the *input* free algebra at
    # stage 1; rebuilt against the growing algebra below
    stage_plan: list[tuple[str, int, object]] = []  # (name, hom, value in old algebra)

    internal_shift = -1 if flavor == "DGL" else +1

    # ---- stage 1: relations, reduced against the ideal of the earlier ones
    accepted: list = []
    for r in sorted(h.relations, key=lambda e: (e.degree(),
                                                [k for k, _ in e.sorted_terms()])):
        degree = r.degree()
        span = _ideal_span_vectors(h, accepted, degree)
        index = {w: i for i, w in enumerate(h.algebra.basis(degree))}
        vec = {index[w]: c for w, c in r.terms.items()}
        matrix = SparseMatrix.from_columns(span + [vec], len(index))
        if matrix.rank() == SparseMatrix.from_columns(span, len(index)).rank():
            continue  # redundant relation
        accepted.append(r)
        internal = degree - internal_shift
        if internal > cap:
            continue
        prefix = "x" if flavor == "DGL" else "v"
        name = _fresh_name(f"{prefix}{internal}", taken)
        stage_plan.append((name, 1, normalize_primitive(r)))
        gens.append(Generator(name, internal))
        bidegrees[name] = (internal, 1)

    def rebuild() -> BigradedModel:
        """Fresh presentation over the enlarged generator list; differential
        values are transported along the name-preserving inclusion."""
        nonlocal stage_plan
        algebra = free_algebra(flavor, gens)
        values = {g.name: algebra.gen(g.name) for g in gens}
        rebuilt = {name: substitute(value, values, algebra)
                   for name, _, value in stage_plan}
        presentation = DgPresentation(flavor, list(gens), rebuilt, algebra=algebra)
        stage_plan = [(name, hom, rebuilt[name]) for name, hom, _ in stage_plan]
        return BigradedModel(presentation, dict(bidegrees), h, cap)

    model = rebuild()

    # ---- stages >= 2: kill leftover homology one homological degree at a
    # time; within a stage the model is rebuilt after every attachment batch,
    # since new generators contribute boundaries at higher internal degrees
    stage = 2
    while True:
        added = False
        for internal in range(1, cap + 1):
            attach_degree = internal - internal_shift  # degree of a new generator
            if attach_degree > cap or attach_degree < 1:
                continue
            dim, reps = model.block_homology(internal, stage - 1)
            if not dim:
                continue
            prefix = "x" if flavor == "DGL" else "v"
            for rep in reps:
                name = _fresh_name(f"{prefix}{attach_degree}", taken)
                stage_plan.append((name, stage, normalize_primitive(rep)))
                gens.append(Generator(name, attach_degree))
                bidegrees[name] = (attach_degree, stage)
            model = rebuild()
            added = True
        if not added:
            break
        stage += 1
        if stage > cap + 2:
            raise ArithmeticError("bigraded construction failed to terminate")
    return model


# --------------------------------------------------------- minimal DGA model

def _is_minimal(p: DgPresentation) -> bool:
    """Image of d contained in products of two or more generators."""
    for name in p.gen_names:
        value = p.d_of_gen(name)
        if not value.is_zero():
            if any(len(word) < 2 for word in value.terms):
                return False
    return True


def minimal_model_dga(a: DgPresentation, cap: int) -> tuple[DgPresentation, DgMorphism]:
    """Minimal Sullivan model of a free-on-generators commutative presentation.

    Classic degree-by-degree construction: in each degree, first adjoin closed
    generators hitting the cokernel of H(q), then generators killing the
    kernel of H(q) one degree up.  Input must be simply connected.
    """
    if a.flavor != "DGA":
        raise ValueError("minimal models here are for the commutative flavor")
    if any(g.degree < 2 for g in a.generators):
        raise ValueError("unsupported: input must be simply connected")
    if _is_minimal(a):
        identity = DgMorphism(a, a, {n: a.algebra.gen(n) for n in a.gen_names})
        return a, identity

    gens: list[Generator] = []
    taken: set = set(a.gen_names)
    d_values: dict[str, GcaElement] = {}   # in the current model algebra
    q_values: dict[str, GcaElement] = {}   # in the target algebra

    def current() -> tuple[DgPresentation, DgMorphism]:
        algebra = FreeGca(gens)
        values = {g.name: algebra.gen(g.name) for g in gens}
        diff = {name: substitute(v, values, algebra)
                for name, v in d_values.items() if not v.is_zero()}
        m = DgPresentation("DGA", list(gens), diff, algebra=algebra)
        return m, DgMorphism(m, a, dict(q_values))

    for degree in range(2, cap + 1):
        model, q = current()
        target_h = a._degree_homology(degree)
        if gens:
            model_h = model._degree_homology(degree)
            images = []
            for rep in model_h.representatives:
                cls = a.homology_class_of(q.apply(rep), cap=degree)
                coeffs = cls.coefficients or (ZERO,) * target_h.dim
                images.append({i: c for i, c in enumerate(coeffs) if c})
        else:
            images = []
        # --- cokernel: new closed generators mapping to the missed classes
        missed = []
        span = list(images)
        for j in range(target_h.dim):
            candidate = {j: ONE}
            with_j = SparseMatrix.from_columns(span + [candidate], target_h.dim)
            if with_j.rank() > SparseMatrix.from_columns(span, target_h.dim).rank():
                span.append(candidate)
                missed.append(j)
        for j in missed:
            name = _fresh_name(f"m{degree}", taken)
            gens.append(Generator(name, degree))
            d_values[name] = FreeGca(gens).zero()
            q_values[name] = target_h.representatives[j]
        if missed:
            model, q = current()
        # --- kernel one degree up: generators whose d kills spurious classes
        if gens:
            model_h1 = model._degree_homology(degree + 1)
            target_h1 = a._degree_homology(degree + 1)
            images1 = []
            for rep in model_h1.representatives:
                cls = a.homology_class_of(q.apply(rep), cap=degree + 1)
                coeffs = cls.coefficients or (ZERO,) * target_h1.dim
                images1.append({i: c for i, c in enumerate(coeffs) if c})
            kernel = SparseMatrix.from_columns(images1, target_h1.dim).kernel_basis()
            for vec in kernel:
                cycle = model.algebra.zero()
                for i, c in vec.items():
                    cycle = cycle + c * model_h1.representatives[i]
                image_cycle = q.apply(cycle)
                # q(cycle) is exact in the target; pick the canonical preimage
                alpha_vec = a.d_matrix(degree).solve(
                    a.vector_of(image_cycle, degree + 1))
                if alpha_vec is None:
                    raise ArithmeticError("kernel class not exact in the target")
                alpha = a.element_from_vector(degree, alpha_vec)
                name = _fresh_name(f"m{degree}", taken)
                gens.append(Generator(name, degree))
                d_values[name] = cycle
                q_values[name] = alpha
    model, q = current()
    if not _is_minimal(model):
        raise ArithmeticError("construction produced a non-minimal differential")
    return model, q


# ------------------------------------------------------------ filtered model

@dataclass
class FilteredModel:
    base: BigradedModel
    perturbation: dict[str, object]          # name -> element of base algebra
    comparison: DgMorphism                    # (B, D) -> target
    cap: int

    def presentation(self) -> DgPresentation:
        return self.comparison.source

    @property
    def target(self) -> DgPresentation:
        return self.comparison.target


def _filtration_words(model: BigradedModel, internal: int, max_hom: int) -> list:
    if max_hom < 0 or internal < 1:
        return []
    return [k for k in model.underlying.basis(internal)
            if model.hom_degree_of_word(k) <= max_hom]


def filtered_model(bg: BigradedModel, target: DgPresentation,
                   cap: int) -> FilteredModel:
    """Deform a bigraded model until it maps quasi-isomorphically to target.

    Processes generators by internal degree; for each one solves the joint
    linear system for (comparison value, perturbation value).  Unknowns are
    ordered with the comparison first, so the canonical solution switches on
    perturbation terms only when forced.
    """
    if bg.flavor != target.flavor:
        raise ValueError("flavors of model and target differ")
    p = bg.underlying
    hdims = target.homology(cap).dims()
    zero_stage = [n for n, (_, hom) in bg.bidegrees.items() if hom == 0]
    # necessary (cheap) homology match: dimensions agree up to the cap
    model_dims = p.homology(cap).dims()
    if model_dims[:cap - 1] != hdims[:cap - 1]:
        raise ValueError(
            f"homology mismatch: model {model_dims} vs target {hdims}")

    phi: dict[str, object] = {}
    perturbation: dict[str, object] = {}
    reps = bg.input_presentation.class_reps or {}
    for name in zero_stage:
        internal, _ = bg.bidegrees[name]
        rep = reps.get(name)
        if rep is not None and rep.algebra is target.algebra:
            phi[name] = rep  # presentation was extracted from this target
            continue
        match = next((g for g in target.generators
                      if g.name == name and g.degree == internal), None)
        if match is None or not target.d_of_gen(name).is_zero():
            raise ValueError(
                f"cannot match homology generator {name!r} with a closed "
                f"target generator of degree {internal}")
        phi[name] = target.algebra.gen(name)

    order = sorted((bid, name) for name, bid in bg.bidegrees.items()
                   if bid[1] >= 1)
    d_sign = p.d_degree
    for (internal, hom), name in sorted(order, key=lambda t: (t[0][0], t[0][1], t[1])):
        dg_value = p.d_of_gen(name)
        allowed = _filtration_words(bg, internal + d_sign, hom - 2)
        target_basis = target.basis(internal)
        n_phi = len(target_basis)
        n_pert = len(allowed)

        # Current D-derivation (known on processed generators; zero beyond)
        def D_of_letter(letter: int):
            gname = p.algebra.generators[letter].name
            base = p.d_of_gen(gname)
            extra = perturbation.get(gname)
            return base + extra if extra is not None else base

        def D_apply(element):
            out = p.algebra.zero()
            for word, coeff in element.terms.items():
                if len(word) == 1:
                    out = out + coeff * D_of_letter(word[0])
                else:
                    out = out + coeff * _derive(p, word, D_of_letter)
            return out

        def phi_apply(element):
            return substitute(element, phi, target.algebra)

        # equation block 1 (in B, internal + 2*d_sign): D(dg) + D(P) = 0
        eq1_len_basis = p.basis(internal + 2 * d_sign)
        eq1_index = {k: i for i, k in enumerate(eq1_len_basis)}
        const1 = D_apply(dg_value)
        col1 = []
        for w in allowed:
            value = D_apply(_as_element(p, w))
            col1.append({eq1_index[k]: c for k, c in value.terms.items()})
        # equation block 2 (in target, internal + d_sign):
        #   d_T(phi g) - phi(dg) - phi(P) = 0
        eq2_basis = target.basis(internal + d_sign)
        eq2_index = {k: i for i, k in enumerate(eq2_basis)}
        const2 = phi_apply(dg_value)
        dT = target.d_matrix(internal)
        col2_phi = []
        for j in range(n_phi):
            col2_phi.append({i: v for (i, jj), v in dT.entries.items() if jj == j})
        col2_pert = []
        for w in allowed:
            value = phi_apply(_as_element(p, w))
            col2_pert.append({eq2_index[k]: c for k, c in value.terms.items()})

        rows1 = len(eq1_len_basis)
        rows2 = len(eq2_basis)
        columns = []
        for j in range(n_phi):
            col = {rows1 + i: v for i, v in col2_phi[j].items()}
            columns.append(col)
        for w_idx in range(n_pert):
            col = dict(col1[w_idx])
            for i, v in col2_pert[w_idx].items():
                col[rows1 + i] = col.get(rows1 + i, ZERO) - v
                if not col[rows1 + i]:
                    del col[rows1 + i]
            columns.append(col)
        rhs: dict[int, Fraction] = {}
        for k, c in const1.terms.items():
            rhs[eq1_index[k]] = -c
        for k, c in const2.terms.items():
            rhs[rows1 + eq2_index[k]] = rhs.get(rows1 + eq2_index[k], ZERO) + c
        solution = SparseMatrix.from_columns(columns, rows1 + rows2).solve(rhs)
        if solution is None:
            raise ArithmeticError(
                f"no compatible perturbation for generator {name!r}; "
                "target homology does not match the model")
        phi_vec = {i: solution[i] for i in solution if i < n_phi}
        pert_vec = {i - n_phi: solution[i] for i in solution if i >= n_phi}
        phi[name] = target.element_from_vector(internal, phi_vec)
        if pert_vec:
            value = p.algebra.zero()
            for i, c in pert_vec.items():
                value = value + c * _as_element(p, allowed[i])
            perturbation[name] = value

    # assemble (B, D) and the comparison morphism
    new_diff = {}
    for g in p.generators:
        value = p.d_of_gen(g.name)
        extra = perturbation.get(g.name)
        total = value + extra if extra is not None else value
        if not total.is_zero():
            new_diff[g.name] = total
    deformed = DgPresentation(p.flavor, list(p.generators), new_diff,
                              algebra=p.algebra)
    comparison = DgMorphism(deformed, target, dict(phi))
    return FilteredModel(bg, perturbation, comparison, cap)


def _as_element(p: DgPresentation, word):
    if p.flavor == "DGA":
        return GcaElement(p.algebra, {word: ONE})
    return p.algebra.word_as_element(word)


def _derive(p: DgPresentation, word, letter_map):
    if p.flavor == "DGA":
        return p.algebra.derive_monomial(word, letter_map)
    return p.algebra.derive_word(word, letter_map)


# ------------------------------------------------------- perturbation system

Monomial = tuple[int, ...]
Poly = dict[Monomial, Fraction]


def _padd(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    for m, c in b.items():
        total = out.get(m, ZERO) + c
        if total:
            out[m] = total
        else:
            out.pop(m, None)
    return out


def _pscale(a: Poly, c: Fraction) -> Poly:
    return {m: v * c for m, v in a.items()} if c else {}


def _pmul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = tuple(sorted(m1 + m2))
            total = out.get(m, ZERO) + c1 * c2
            if total:
                out[m] = total
            else:
                out.pop(m, None)
    return out


@dataclass
class PerturbationSystem:
    """Quadratic equations cutting out all degree-capped perturbations.

    ``variables[i]`` names the coefficient of one admissible word in the
    perturbation of one generator.  Each equation is the coefficient of one
    basis word in D∘D(generator) and must vanish.
    """
    variables: list[dict]
    equations: list[dict]
    cap: int
    flavor: str

    def as_json_doc(self) -> dict:
        return {"schema": 1, "flavor": self.flavor, "cap": self.cap,
                "variables": self.variables, "equations": self.equations}

    def evaluate(self, assignment: Mapping[str, object]) -> list[dict]:
        """Residuals of all equations at a (name -> scalar) assignment;
        unmentioned variables default to zero.  Empty list means satisfied."""
        values = {}
        for i, var in enumerate(self.variables):
            values[i] = frac(assignment.get(var["name"], 0))
        failures = []
        for eq in self.equations:
            total = ZERO
            for term in eq["terms"]:
                c = frac(term["coefficient"])
                for v in term["variables"]:
                    c *= values[v]
                total += c
            if total:
                failures.append({"generator": eq["generator"],
                                 "word": eq["word"], "residual": str(total)})
        return failures


def perturbation_system(bg: BigradedModel, cap: int) -> PerturbationSystem:
    p = bg.underlying
    d_sign = p.d_degree
    variables: list[dict] = []
    var_index: dict[tuple[str, object], int] = {}
    gen_words: dict[str, list] = {}
    for name, (internal, hom) in sorted(bg.bidegrees.items(),
                                        key=lambda t: (t[1][0], t[1][1], t[0])):
        if hom < 2 or internal > cap:
            continue
        words = _filtration_words(bg, internal + d_sign, hom - 2)
        gen_words[name] = words
        for w in words:
            var_index[(name, w)] = len(variables)
            variables.append({"name": f"{name}|{p.display_key(w)}",
                              "generator": name,
                              "word": p.display_key(w)})

    def unknown_of_letter(letter: int) -> dict:
        """Perturbation of one generator as word -> Poly (degree-1 polys)."""
        gname = p.algebra.generators[letter].name
        out: dict = {}
        for w in gen_words.get(gname, []):
            out[w] = {(var_index[(gname, w)],): ONE}
        return out

    def apply_unknown(terms: dict) -> dict:
        """Extend the unknown perturbation as a derivation; input and output
        are word -> Poly maps."""
        out: dict = {}
        for word, poly in terms.items():
            derived = _derive_unknown(p, word, unknown_of_letter)
            for w, inner_poly in derived.items():
                out[w] = _padd(out.get(w, {}), _pmul(inner_poly, poly))
        return {w: q for w, q in out.items() if q}

    equations: list[dict] = []
    for name, words in gen_words.items():
        internal, hom = bg.bidegrees[name]
        # D^2(name) = d(P(name)) + P(d name) + P(P(name)), coefficients in Poly
        residual: dict = {}
        # P as word->Poly for this generator
        p_of_g = {w: {(var_index[(name, w)],): ONE} for w in words}
        # d(P g)
        for w, poly in p_of_g.items():
            value = p.d_key(w)
            for k, c in value.terms.items():
                residual[k] = _padd(residual.get(k, {}), _pscale(poly, c))
        # P(d g)
        dg = p.d_of_gen(name)
        for k, poly in apply_unknown({w: {(): c} for w, c in dg.terms.items()}).items():
            residual[k] = _padd(residual.get(k, {}), poly)
        # P(P g)
        for k, poly in apply_unknown(p_of_g).items():
            residual[k] = _padd(residual.get(k, {}), poly)
        for k in sorted(residual, key=lambda w: p.display_key(w)):
            poly = residual[k]
            if not poly:
                continue
            terms = [{"coefficient": str(c), "variables": list(m)}
                     for m, c in sorted(poly.items())]
            equations.append({"generator": name, "word": p.display_key(k),
                              "terms": terms})
    return PerturbationSystem(variables=variables, equations=equations,
                              cap=cap, flavor=p.flavor)


def _derive_unknown(p: DgPresentation, word, unknown_of_letter) -> dict:
    """Leibniz extension of a word->Poly letter map along one basis word."""
    if p.flavor == "DGL":
        if len(word) == 1:
            return unknown_of_letter(word[0])
        left, right = p.algebra.split_word(word)
        out: dict = {}
        dl = _derive_unknown(p, left, unknown_of_letter)
        dr = _derive_unknown(p, right, unknown_of_letter)
        right_el = p.algebra.word_as_element(right)
        left_el = p.algebra.word_as_element(left)
        for w, poly in dl.items():
            product = p.algebra.bracket(p.algebra.word_as_element(w), right_el)
            for k, c in product.terms.items():
                out[k] = _padd(out.get(k, {}), _pscale(poly, c))
        sign = -ONE if p.algebra.word_degree(left) % 2 else ONE
        for w, poly in dr.items():
            product = p.algebra.bracket(left_el, p.algebra.word_as_element(w))
            for k, c in product.terms.items():
                out[k] = _padd(out.get(k, {}), _pscale(poly, sign * c))
        return out
    # DGA flavor
    out = {}
    prefix_degree = 0
    for i, letter in enumerate(word):
        part = unknown_of_letter(letter)
        if part:
            sign = -ONE if prefix_degree % 2 else ONE
            for w, poly in part.items():
                left = GcaElement(p.algebra, {word[:i]: sign})
                mid = GcaElement(p.algebra, {w: ONE})
                right = GcaElement(p.algebra, {word[i + 1:]: ONE})
                product = left * mid * right
                for k, c in product.terms.items():
                    out[k] = _padd(out.get(k, {}), _pscale(poly, c))
        prefix_degree += p.algebra.generators[letter].degree
    return out


def extract_assignment(fm: FilteredModel) -> dict[str, Fraction]:
    """Perturbation coefficients of a filtered model, keyed like the
    perturbation-system variables."""
    p = fm.base.underlying
    out: dict[str, Fraction] = {}
    for name, value in fm.perturbation.items():
        for w, c in value.terms.items():
            out[f"{name}|{p.display_key(w)}"] = c
    return out


# ------------------------------------------------- homology as a presentation

def present_homology(p: DgPresentation, cap: int) -> GradedAlgebraPresentation:
    """Generators and relations of H(p) up to the cap, with stored cycle
    representatives for each generator."""
    if p.flavor not in ("DGL", "DGA"):
        raise ValueError("homology presentations support DGL and DGA flavors")
    flavor = "GLA" if p.flavor == "DGL" else "GCA"
    lower = 1 if flavor == "GLA" else 2
    chosen: list[tuple[str, int, object]] = []  # (name, degree, rep in p)
    taken: set = set()

    def eval_word_factory(algebra, reps):
        cache: dict = {}

        def eval_word(word):
            if word not in cache:
                if flavor == "GLA":
                    if len(word) == 1:
                        cache[word] = reps[word[0]]
                    else:
                        left, right = algebra.split_word(word)
                        cache[word] = p.algebra.bracket(eval_word(left),
                                                        eval_word(right))
                else:
                    out = p.algebra.one()
                    for letter in word:
                        out = out * reps[letter]
                    cache[word] = out
            return cache[word]
        return eval_word

    for degree in range(lower, cap + 1):
        data = p._degree_homology(degree)
        if data.dim == 0:
            continue
        # span of products of the generators already chosen
        gens_so_far = [Generator(n, d) for n, d, _ in chosen]
        span_vectors: list[dict[int, Fraction]] = []
        if gens_so_far:
            free = (FreeGradedLie(gens_so_far) if flavor == "GLA"
                    else FreeGca(gens_so_far))
            eval_word = eval_word_factory(free, [r for _, _, r in chosen])
            for word in free.basis(degree):
                if len(word) < 2:
                    continue
                value = eval_word(word)
                cls = p.homology_class_of(value, cap=degree)
                if cls.status == "class":
                    span_vectors.append(
                        {i: c for i, c in enumerate(cls.coefficients) if c})
        rank = SparseMatrix.from_columns(span_vectors, data.dim).rank()
        for j in range(data.dim):
            trial = span_vectors + [{j: ONE}]
            new_rank = SparseMatrix.from_columns(trial, data.dim).rank()
            if new_rank > rank:
                span_vectors.append({j: ONE})
                rank = new_rank
                name = _fresh_name(f"h{degree}", taken)
                chosen.append((name, degree, data.representatives[j]))

    gens = [Generator(n, d) for n, d, _ in chosen]
    algebra = FreeGradedLie(gens) if flavor == "GLA" else FreeGca(gens)
    reps = [r for _, _, r in chosen]
    eval_word = eval_word_factory(algebra, reps)
    relations = []
    accepted: list = []
    pres = GradedAlgebraPresentation(flavor, gens, [], algebra=algebra)
    for degree in range(lower, cap + 1):
        words = [w for w in algebra.basis(degree)]
        if not words:
            continue
        h_dim = p._degree_homology(degree).dim
        columns = []
        for w in words:
            value = eval_word(w)
            cls = p.homology_class_of(value, cap=degree)
            coeffs = cls.coefficients or (ZERO,) * h_dim
            columns.append({i: c for i, c in enumerate(coeffs) if c})
        kernel = SparseMatrix.from_columns(columns, h_dim).kernel_basis()
        for vec in kernel:
            element = algebra.zero()
            for i, c in vec.items():
                element = element + c * (
                    algebra.word_as_element(words[i]) if flavor == "GLA"
                    else GcaElement(algebra, {words[i]: ONE}))
            span = _ideal_span_vectors(pres, accepted, degree)
            index = {w: i for i, w in enumerate(algebra.basis(degree))}
            vec2 = {index[w]: c for w, c in element.terms.items()}
            with_it = SparseMatrix.from_columns(span + [vec2], len(index))
            if with_it.rank() == SparseMatrix.from_columns(span, len(index)).rank():
                continue
            element = normalize_primitive(element)
            accepted.append(element)
            relations.append(element)
    return GradedAlgebraPresentation(flavor, gens, relations, algebra=algebra,
                                     class_reps={n: r for n, d, r in chosen})


# ------------------------------------------------------------ formality test

@dataclass
class FormalityResult:
    status: str                      # "formal" | "not-formal" | "inconclusive"
    cap: int
    obstruction_degree: Optional[int] = None
    obstruction: Optional[str] = None
    detail: str = ""

    def __bool__(self):
        raise TypeError("three-valued result; inspect .status explicitly")


def is_formal_up_to(p: DgPresentation, cap: int,
                    budget: Optional[int] = None) -> FormalityResult:
    """Can p be compared with the zero-differential model of its homology in
    degrees <= cap?

    Builds the bigraded model of H(p) and pushes a comparison morphism
    through it degree by degree.  Where the greedy choice obstructs, the
    full affine space of gauge corrections (with the identity normalization
    on homology) is swept: if even its linear hull cannot cancel the
    obstruction class, the answer is a certified "not-formal"; if a repaired
    choice goes through, the march continues.  Exceeding the step budget
    returns "inconclusive".
    """
    if budget is None:
        budget = int(os.environ.get(FORMAL_BUDGET_ENV, DEFAULT_FORMAL_BUDGET))
    steps = 0

    def spend(n=1):
        nonlocal steps
        steps += n
        if steps > budget:
            raise _BudgetExceeded()

    try:
        h = present_homology(p, cap)
        bg = bigraded_model(h, cap)
        model = bg.underlying
        psi: dict[str, object] = {}
        freedom: dict[str, list] = {}   # name -> cycle (or boundary) elements
        for name, (internal, hom) in bg.bidegrees.items():
            if hom == 0:
                psi[name] = h.class_reps[name]
                # identity normalization: hom-0 values may move by boundaries
                incoming = p.d_matrix(internal - p.d_degree)
                columns: dict[int, dict[int, Fraction]] = {}
                for (i, j), v in incoming.entries.items():
                    columns.setdefault(j, {})[i] = v
                rows = SparseMatrix(
                    len(columns), len(p.basis(internal)),
                    {(r, i): v for r, col in enumerate(columns.values())
                     for i, v in col.items()}).rref()[0]
                freedom[name] = [p.element_from_vector(internal, row)
                                 for row in rows if row]
        order = sorted(((bid, name) for name, bid in bg.bidegrees.items()
                        if bid[1] >= 1), key=lambda t: (t[0][0], t[0][1], t[1]))
        for (internal, hom), name in order:
            spend()
            dg_value = model.d_of_gen(name)
            rhs = substitute(dg_value, psi, p.algebra)
            target_degree = internal + p.d_degree
            matrix = p.d_matrix(internal)
            solution = matrix.solve(p.vector_of(rhs, target_degree))
            if solution is None:
                result = _obstruction_analysis(p, model, bg, psi, freedom,
                                               name, internal, dg_value, spend)
                if result is not None:
                    return result
                # repaired; recompute with updated psi
                rhs = substitute(dg_value, psi, p.algebra)
                solution = matrix.solve(p.vector_of(rhs, target_degree))
                if solution is None:
                    return FormalityResult(
                        status="inconclusive", cap=cap,
                        obstruction_degree=internal,
                        detail=f"gauge repair failed at generator {name!r}")
            psi[name] = p.element_from_vector(internal, solution)
            # record the cycle freedom at this generator for later repairs
            cycles = matrix.kernel_basis()
            freedom[name] = [p.element_from_vector(internal, v) for v in cycles]
        return FormalityResult(status="formal", cap=cap)
    except _BudgetExceeded:
        return FormalityResult(status="inconclusive", cap=cap,
                               detail=f"budget of {budget} steps exceeded")


class _BudgetExceeded(Exception):
    pass


def _obstruction_analysis(p, model, bg, psi, freedom, name, internal,
                          dg_value, spend):
    """Decide whether gauge corrections can cancel the obstruction at one
    generator.  Returns a FormalityResult to certify failure, or None after
    successfully repairing ``psi`` in place."""
    # affine parameterization: each earlier generator may move by its
    # recorded freedom; expand psi(d g) multilinearly in those directions
    degree = internal + p.d_degree
    directions: list[tuple[str, object]] = []
    for gname, cycles in freedom.items():
        for cycle in cycles:
            directions.append((gname, cycle))
    base_values = dict(psi)

    # monomial expansion: substitute value + sum(t_i * dir_i) and collect by
    # multidegree in the t's
    expanded: dict[tuple[int, ...], object] = {}

    def add_term(mono: tuple[int, ...], element):
        if element.is_zero():
            return
        if mono in expanded:
            expanded[mono] = expanded[mono] + element
        else:
            expanded[mono] = element

    def eval_affine(word) -> dict[tuple[int, ...], object]:
        if len(word) == 1:
            letter_name = model.algebra.generators[word[0]].name
            out = {(): base_values[letter_name]}
            for idx, (gname, cycle) in enumerate(directions):
                if gname == letter_name:
                    out[(idx,)] = cycle
            return out
        if p.flavor == "DGL":
            left, right = model.algebra.split_word(word)
            lv, rv = eval_affine(left), eval_affine(right)
            out: dict = {}
            for m1, e1 in lv.items():
                for m2, e2 in rv.items():
                    mono = tuple(sorted(m1 + m2))
                    product = p.algebra.bracket(e1, e2)
                    if not product.is_zero():
                        out[mono] = out[mono] + product if mono in out else product
            return out
        out = {(): p.algebra.one()}
        for letter in word:
            letter_terms = eval_affine((letter,))
            new: dict = {}
            for m1, e1 in out.items():
                for m2, e2 in letter_terms.items():
                    mono = tuple(sorted(m1 + m2))
                    product = e1 * e2
                    if not product.is_zero():
                        new[mono] = new[mono] + product if mono in new else product
            out = new
        return out

    for word, coeff in dg_value.terms.items():
        spend()
        for mono, element in eval_affine(word).items():
            add_term(mono, coeff * element)

    constant = expanded.pop((), p.algebra.zero())
    # classes: the obstruction and every direction of movement are cycles
    h_data = p._degree_homology(degree)
    dim = h_data.dim
    const_class = p.homology_class_of(constant, cap=degree)
    if const_class.status != "class":
        # constant part already exact; a pure-direction cancellation must
        # exist — fall through to repair
        pass
    vectors = []
    monos = sorted(expanded)
    for mono in monos:
        cls = p.homology_class_of(expanded[mono], cap=degree)
        coeffs = cls.coefficients or (ZERO,) * dim
        vectors.append({i: c for i, c in enumerate(coeffs) if c})
    const_vec = {i: -c for i, c in
                 enumerate(const_class.coefficients or (ZERO,) * dim) if c}
    solve = SparseMatrix.from_columns(vectors, dim).solve(const_vec)
    if solve is None:
        return FormalityResult(
            status="not-formal", cap=bg.cap, obstruction_degree=degree,
            obstruction=constant.display(),
            detail=(f"obstruction class at generator {name!r} survives every "
                    "gauge correction"))
    # attempt a linear repair: apply the solved coefficients along the
    # single-direction monomials, then let the caller re-solve
    applied: dict[str, object] = {}
    for col, value in solve.items():
        mono = monos[col]
        if len(mono) != 1 or not value:
            continue
        gname, cycle = directions[mono[0]]
        applied[gname] = applied.get(gname, p.algebra.zero()) + value * cycle
    if not applied:
        return FormalityResult(
            status="inconclusive", cap=bg.cap, obstruction_degree=degree,
            detail=(f"obstruction at {name!r} needs a nonlinear gauge "
                    "correction beyond this search"))
    for gname, delta in applied.items():
        psi[gname] = psi[gname] + delta
    return None
