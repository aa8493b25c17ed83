"""Simplicial sphere–disk resolutions and the operations built on them.

The tower machinery itself lives in :mod:`ratmodels.markers`; this module
adds the worked examples that exercise it end to end: three small
differential graded Lie / lambda-operation algebras, explicit cell systems
exhibiting their homotopy generators and relations through simplicial
dimension three, half-smash models of spheres and disks against low cubes,
a chain-level secondary operation with its indeterminacy, a Moore-complex
shadow of levelwise homology, and a frozen-assertion corpus runner.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from . import io
from .dg import DgMorphism, DgPresentation, SphereDisk
from .lie import FreeGradedLie, Generator
from .linalg import SparseMatrix
from .markers import SimplicialTower, stover_level
from .nonassoc import NaAlgebra, project_to_lie
from .wcat import HigherOperationValue

__all__ = [
    "quadratic_example", "perturbed_example", "jacobi_example",
    "jacobi_lie_shadow", "StoverResolution", "example_resolution_B",
    "example_resolution_Bprime", "jacobi_resolution",
    "jacobi_resolution_checks", "IdentityCheck", "IdentityReport",
    "LambdaShadow", "half_smash", "HalfSmashModel", "OperationDatum",
    "OperationUndefinedError", "secondary_operation", "homotopy_shadow",
    "ShadowReport", "run_corpus", "CorpusEntry", "CorpusReport",
    "stover_level",
]


# ----------------------------------------------------------- example bases

_LIE_GENS = (("a", 1), ("b", 1), ("c", 2), ("x", 3), ("y", 5), ("w", 6),
             ("z", 7))


def quadratic_example() -> DgPresentation:
    """Free DGL on a1, b1, c2, x3, y5, w6, z7 with purely quadratic
    differential; its homology realizes the graded Lie algebra presented by
    the relations [a,a] and [[c,a],[b,a]]."""
    gens = [Generator(n, d) for n, d in _LIE_GENS]
    alg = FreeGradedLie(gens)
    a, b, c, x, y, w, z = (alg.gen(n) for n in "abcxywz")
    return DgPresentation("DGL", gens, {
        "x": a.bracket(a),
        "y": 3 * x.bracket(a),
        "w": c.bracket(a).bracket(b.bracket(a)),
        "z": 4 * y.bracket(a) + 3 * x.bracket(x),
    }, algebra=alg)


def perturbed_example() -> DgPresentation:
    """Same generators as :func:`quadratic_example` but with lower-order
    terms added to d(y) and d(z); the two have different degree-7 homology."""
    gens = [Generator(n, d) for n, d in _LIE_GENS]
    alg = FreeGradedLie(gens)
    a, b, c, x, y, w, z = (alg.gen(n) for n in "abcxywz")
    return DgPresentation("DGL", gens, {
        "x": a.bracket(a),
        "y": 3 * x.bracket(a) - b.bracket(a).bracket(c),
        "w": c.bracket(a).bracket(b.bracket(a)),
        "z": 4 * y.bracket(a) + 3 * x.bracket(x) - 4 * alg.gen("w")
             - 2 * x.bracket(b).bracket(c),
    }, algebra=alg)


def jacobi_example() -> DgPresentation:
    """A lambda-operation (DGN) presentation on a1, x3, y5, z7 whose
    differential needs the formal lambda words: the bracket-only shadow of
    d(y) and d(z) is corrected by lam3/lam4 terms so that d*d = 0 holds
    without the Jacobi identity."""
    gens = [Generator("a", 1), Generator("x", 3), Generator("y", 5),
            Generator("z", 7)]
    alg = NaAlgebra(gens)
    a, x, y, z = (alg.gen(n) for n in "axyz")
    return DgPresentation("DGN", gens, {
        "x": a.bracket(a),
        "y": 3 * x.bracket(a) - alg.lam(3, [a, a, a]),
        "z": 4 * y.bracket(a) + 3 * x.bracket(x) - 6 * alg.lam(3, [x, a, a])
             + alg.lam(4, [a, a, a, a]),
    }, algebra=alg)


def jacobi_lie_shadow() -> DgPresentation:
    """The bracket-only quotient of :func:`jacobi_example`: the same
    generators as a free DGL, with every lambda word projected away."""
    gens = [Generator("a", 1), Generator("x", 3), Generator("y", 5),
            Generator("z", 7)]
    alg = FreeGradedLie(gens)
    a, x, y, z = (alg.gen(n) for n in "axyz")
    return DgPresentation("DGL", gens, {
        "x": a.bracket(a),
        "y": 3 * x.bracket(a),
        "z": 4 * y.bracket(a) + 3 * x.bracket(x),
    }, algebra=alg)


# ------------------------------------------------------- resolutions proper

@dataclass
class StoverResolution:
    """A simplicial tower together with a named system of cells.

    ``cells`` maps a stable key (``"y0"``, ``"z2"``, ...) to a pair
    ``(level, element)``.  ``attachments`` records how each non-closed cell
    bounds: ``child -> [(coeff, face_index, parent), ...]`` asserts that the
    levelwise differential of the child equals the signed sum of the listed
    faces of its parents.  Cells without an attachment entry are closed.
    """

    base: DgPresentation
    tower: SimplicialTower
    cells: Dict[str, Tuple[int, object]]
    attachments: Dict[str, List[Tuple[int, int, str]]]

    def level(self, n: int) -> DgPresentation:
        return self.tower.level(n)

    def face(self, n: int, i: int) -> DgMorphism:
        return self.tower.face(n, i)

    def cell(self, key: str):
        return self.cells[key][1]

    def cell_level(self, key: str) -> int:
        return self.cells[key][0]

    def attachment_failure(self, key: str) -> Optional[str]:
        """Check one cell's boundary against its attachment; None if it
        matches (or the cell is closed and indeed has zero boundary)."""
        level, element = self.cells[key]
        lhs = self.tower.level(level).d_element(element)
        terms = self.attachments.get(key)
        if terms is None:
            if lhs.is_zero():
                return None
            return f"cell {key} should be closed but d = {lhs.display()}"
        rhs = self.tower.level(level).zero()
        for coeff, i, parent in terms:
            plevel, pelement = self.cells[parent]
            rhs = rhs + coeff * self.tower.face(plevel, i).apply(pelement)
        if lhs == rhs:
            return None
        return (f"boundary of {key}: d = {lhs.display()} but the attachment "
                f"gives {rhs.display()}")

    def check_cells(self) -> List[str]:
        problems = []
        for key in self.cells:
            failure = self.attachment_failure(key)
            if failure:
                problems.append(failure)
        return problems


def _tower_caps(cap: int) -> Tuple[int, int, int, int]:
    return (cap, cap - 1, cap - 2, cap - 3)


def _lie_resolution(base: DgPresentation, cap: int,
                    perturbed: bool) -> StoverResolution:
    if cap < 7:
        raise ValueError("the example resolutions need cap >= 7")
    tower = SimplicialTower(base, _tower_caps(cap))
    l0 = tower.level(0).algebra
    a0, b0, c0 = (l0.gen(f"<{n}>") for n in "abc")
    x0, y0, w0 = (l0.gen(f"<{n}>") for n in "xyw")

    X0 = tower.wrap(1, a0.bracket(a0))
    A = tower.wrap(1, a0)
    W0 = tower.wrap(1, c0.bracket(a0).bracket(b0.bracket(a0)))
    Y0 = 3 * tower.wrap(2, X0.bracket(A))
    h1 = tower.wrap(1, x0.bracket(a0))
    h2 = tower.wrap(1, x0)
    Z0 = tower.wrap(3, 12 * tower.wrap(2, X0.bracket(A)).bracket(tower.wrap(2, A))
                    + 6 * tower.wrap(2, A.bracket(A)).bracket(tower.wrap(2, X0)))
    if perturbed:
        B1 = tower.wrap(1, b0)
        C1 = tower.wrap(1, c0)
        balg = base.algebra
        # <[[b,a],c]> is a closed degree-4 marker; without its bracket
        # against A the z-chain would not close up at the next level down.
        M = tower.wrap(1, tower.wrap(0, balg.gen("b").bracket(balg.gen("a"))
                                     .bracket(balg.gen("c"))))
        Y1 = tower.wrap(1, 3 * x0.bracket(a0) - b0.bracket(a0).bracket(c0))
        Z1 = tower.wrap(2, 12 * h1.bracket(A) + 6 * X0.bracket(h2)
                        - 4 * W0 - 2 * X0.bracket(B1).bracket(C1)
                        - 4 * M.bracket(A))
        Z2 = tower.wrap(1, 4 * y0.bracket(a0) + 3 * x0.bracket(x0)
                        - 4 * w0 - 2 * x0.bracket(b0).bracket(c0))
    else:
        Y1 = 3 * tower.wrap(1, x0.bracket(a0))
        Z1 = tower.wrap(2, 12 * h1.bracket(A) + 6 * X0.bracket(h2))
        Z2 = tower.wrap(1, 4 * y0.bracket(a0) + 3 * x0.bracket(x0))

    cells = {
        "x0": (1, X0), "x1": (0, l0.gen("<x>")),
        "w0": (1, W0), "w1": (0, l0.gen("<w>")),
        "y0": (2, Y0), "y1": (1, Y1), "y2": (0, l0.gen("<y>")),
        "z0": (3, Z0), "z1": (2, Z1), "z2": (1, Z2), "z3": (0, l0.gen("<z>")),
    }
    attachments = {
        "x1": [(1, 1, "x0")],
        "w1": [(1, 1, "w0")],
        "y1": [(1, 2, "y0")], "y2": [(1, 1, "y1")],
        "z1": [(1, 3, "z0")], "z2": [(1, 2, "z1")], "z3": [(1, 1, "z2")],
    }
    return StoverResolution(base, tower, cells, attachments)


def example_resolution_B(cap: int = 7) -> StoverResolution:
    """The sphere–disk resolution of :func:`quadratic_example` through
    simplicial dimension 3, with the full x/y/w/z disk chains."""
    return _lie_resolution(quadratic_example(), cap, perturbed=False)


def example_resolution_Bprime(cap: int = 7) -> StoverResolution:
    """Resolution of :func:`perturbed_example`; the y- and z-chains pick up
    correction terms so every attachment still closes."""
    return _lie_resolution(perturbed_example(), cap, perturbed=True)


def jacobi_resolution(cap: int = 7) -> StoverResolution:
    """Resolution of :func:`jacobi_example`.  Because the base has lambda
    words, the relation cells split: each stage of the y- and z-chains has
    one cell per face whose alternating sum realizes the next attachment."""
    if cap < 7:
        raise ValueError("the example resolutions need cap >= 7")
    base = jacobi_example()
    tower = SimplicialTower(base, _tower_caps(cap))
    l0 = tower.level(0).algebra
    a0, x0, y0 = l0.gen("<a>"), l0.gen("<x>"), l0.gen("<y>")

    X0 = tower.wrap(1, a0.bracket(a0))
    A = tower.wrap(1, a0)
    h1 = tower.wrap(1, x0.bracket(a0))
    h2 = tower.wrap(1, x0)
    Y0 = 3 * tower.wrap(2, X0.bracket(A))
    Y11 = tower.wrap(1, l0.lam(3, [a0, a0, a0]))
    Y12 = 3 * h1
    Z0 = tower.wrap(3, 12 * tower.wrap(2, X0.bracket(A)).bracket(tower.wrap(2, A))
                    + 6 * tower.wrap(2, A.bracket(A)).bracket(tower.wrap(2, X0)))
    l1 = tower.level(1).algebra
    Z11 = 6 * tower.wrap(2, l1.lam(3, [X0, A, A]))
    Z12 = 4 * tower.wrap(2, Y11.bracket(A))
    Z13 = tower.wrap(2, 12 * h1.bracket(A) + 6 * X0.bracket(h2))
    Z212 = tower.wrap(1, l0.lam(4, [a0, a0, a0, a0]))
    Z213 = 6 * tower.wrap(1, l0.lam(3, [x0, a0, a0]))
    Z223 = tower.wrap(1, 4 * y0.bracket(a0) + 3 * x0.bracket(x0))

    cells = {
        "x0": (1, X0), "x1": (0, l0.gen("<x>")),
        "y0": (2, Y0), "y11": (1, Y11), "y12": (1, Y12),
        "y2": (0, l0.gen("<y>")),
        "z0": (3, Z0), "z11": (2, Z11), "z12": (2, Z12), "z13": (2, Z13),
        "z212": (1, Z212), "z213": (1, Z213), "z223": (1, Z223),
        "z3": (0, l0.gen("<z>")),
    }
    attachments = {
        "x1": [(1, 1, "x0")],
        "y11": [(1, 1, "y0")], "y12": [(1, 2, "y0")],
        "y2": [(1, 1, "y12"), (-1, 1, "y11")],
        "z11": [(1, 1, "z0")], "z12": [(1, 2, "z0")], "z13": [(1, 3, "z0")],
        "z212": [(1, 1, "z12"), (-1, 1, "z11")],
        "z213": [(1, 1, "z13"), (-1, 2, "z11")],
        "z223": [(1, 2, "z13"), (-1, 2, "z12")],
        "z3": [(1, 1, "z212"), (-1, 1, "z213"), (1, 1, "z223")],
    }
    return StoverResolution(base, tower, cells, attachments)


# -------------------------------------------------- lambda-to-Lie projection

class LambdaShadow:
    """Levelwise projection of a lambda-operation tower onto the tower over
    the bracket-only shadow of its base.

    Wrap generators go to wraps of projected parents, brackets to brackets,
    and every lambda word to zero.  The shadow base must have the same
    generator names and degrees as the source base.
    """

    def __init__(self, source: SimplicialTower, shadow_base: DgPresentation):
        self.source = source
        self.shadow = SimplicialTower(shadow_base, source.caps)

    def project(self, n: int, element):
        if n < 0:
            return project_to_lie(element, self.shadow.base.algebra)
        out = self.shadow.level(n).algebra.zero()
        for word, coeff in element.terms.items():
            out = out + coeff * self._project_word(n, word)
        return out

    def _project_word(self, n: int, word):
        tag = word[0]
        if tag == "g":
            name = self.source.level(n).algebra.generators[word[1]].name
            parent_word = self.source.parent_word(n, name)
            parent = self.source.parent(n).algebra.word_as_element(parent_word)
            return self.shadow.wrap(n, self.project(n - 1, parent))
        if tag == "p":
            return self._project_word(n, word[1]).bracket(
                self._project_word(n, word[2]))
        return self.shadow.level(n).algebra.zero()

    def commutes_with_differential(self, n: int) -> List[str]:
        """Names of level-``n`` generators where projection fails to be a
        chain map (empty when it is one)."""
        src = self.source.level(n)
        tgt = self.shadow.level(n)
        bad = []
        for name in src.gen_names:
            e = src.algebra.gen(name)
            if self.project(n, src.d_element(e)) != tgt.d_element(self.project(n, e)):
                bad.append(name)
        return bad


# -------------------------------------------------------- identity reports

@dataclass
class IdentityCheck:
    name: str
    ok: bool
    lhs: str = ""
    rhs: str = ""


@dataclass
class IdentityReport:
    checks: List[IdentityCheck]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> List[IdentityCheck]:
        return [c for c in self.checks if not c.ok]

    def summary(self) -> str:
        lines = []
        for c in self.checks:
            if c.ok:
                lines.append(f"ok   {c.name}")
            else:
                lines.append(f"FAIL {c.name}: {c.lhs} != {c.rhs}")
        return "\n".join(lines)


def _disp(element) -> str:
    return element.display()


def jacobi_resolution_checks(cap: int = 7) -> IdentityReport:
    """Re-derive every identity carried by the lambda-operation resolution:
    level validations, all cell attachments, the cube obstruction that keeps
    the bracket-only y-disk from closing, the bottom faces of the z-cells,
    the alternating sums, the simplicial identities, and the projection onto
    the bracket-only shadow tower."""
    res = jacobi_resolution(cap)
    tower = res.tower
    checks: List[IdentityCheck] = []

    for n in range(4):
        rep = tower.level(n).validate(tower.caps[n])
        checks.append(IdentityCheck(f"level {n} validates", rep.ok,
                                    "" if rep.ok else "; ".join(
                                        i.detail for i in rep.issues[:3]), ""))

    for key in res.cells:
        failure = res.attachment_failure(key)
        checks.append(IdentityCheck(f"cell {key} attaches", failure is None,
                                    failure or "", ""))

    l0 = tower.level(0).algebra
    a0, x0, y0 = l0.gen("<a>"), l0.gen("<x>"), l0.gen("<y>")
    A = tower.wrap(1, a0)
    cube = tower.wrap(1, a0.bracket(a0).bracket(a0))
    checks.append(IdentityCheck("<[[a,a],a]> survives (no Jacobi collapse)",
                                not cube.is_zero(), _disp(cube), "0"))
    d1Y0 = tower.face(2, 1).apply(res.cell("y0"))
    checks.append(IdentityCheck("d1 of the y-cylinder is 3<[[a,a],a]>",
                                d1Y0 == 3 * cube, _disp(d1Y0),
                                _disp(3 * cube)))
    d2Z0 = tower.face(3, 2).apply(res.cell("z0"))
    want = 12 * tower.wrap(2, cube.bracket(A))
    checks.append(IdentityCheck("d2 of the z-cylinder is 12<[[[a,a],a],A]>",
                                d2Z0 == want, _disp(d2Z0), _disp(want)))

    base = res.base
    galg = base.algebra
    ga, gx, gy = galg.gen("a"), galg.gen("x"), galg.gen("y")
    bottoms = [
        ("z212", tower.wrap(0, galg.lam(4, [ga, ga, ga, ga]))),
        ("z213", tower.wrap(0, 6 * galg.lam(3, [gx, ga, ga]))),
        ("z223", tower.wrap(0, 4 * gy.bracket(ga) + 3 * gx.bracket(gx))),
    ]
    d1 = {}
    for key, want in bottoms:
        d1[key] = tower.face(1, 1).apply(res.cell(key))
        checks.append(IdentityCheck(f"bottom face of {key}",
                                    d1[key] == want, _disp(d1[key]),
                                    _disp(want)))
    alternating = d1["z212"] - d1["z213"] + d1["z223"]
    dz = tower.wrap(0, base.d_of_gen("z"))
    checks.append(IdentityCheck(
        "alternating bottom faces assemble the differential of z",
        alternating == dz, _disp(alternating), _disp(dz)))

    for n in range(1, 4):
        problems = tower.simplicial_identity_failures(n)
        checks.append(IdentityCheck(f"simplicial identities at level {n}",
                                    not problems,
                                    "; ".join(problems[:3]), ""))

    shadow = LambdaShadow(tower, jacobi_lie_shadow())
    for n in range(2):
        bad = shadow.commutes_with_differential(n)
        checks.append(IdentityCheck(
            f"projection is a chain map at level {n}", not bad,
            ", ".join(bad[:4]), ""))
    s0 = shadow.shadow.level(0).algebra
    sx, sa = s0.gen("<x>"), s0.gen("<a>")
    sh1 = shadow.shadow.wrap(1, sx.bracket(sa))
    sh2 = shadow.shadow.wrap(1, sx)
    sX0 = shadow.shadow.wrap(1, sa.bracket(sa))
    sA = shadow.shadow.wrap(1, sa)
    proj13 = shadow.project(2, res.cell("z13"))
    want13 = shadow.shadow.wrap(2, 12 * sh1.bracket(sA) + 6 * sX0.bracket(sh2))
    checks.append(IdentityCheck("projection keeps the bracket z-cell",
                                proj13 == want13, _disp(proj13),
                                _disp(want13)))
    proj212 = shadow.project(1, res.cell("z212"))
    checks.append(IdentityCheck("projection kills the lam4 cell",
                                proj212.is_zero(), _disp(proj212), "0"))
    salg = shadow.shadow.base.algebra
    want_bottom = shadow.shadow.wrap(
        0, 4 * salg.gen("y").bracket(salg.gen("a"))
        + 3 * salg.gen("x").bracket(salg.gen("x")))
    proj_bottom = shadow.project(0, d1["z223"])
    checks.append(IdentityCheck("projected bottom face matches the shadow",
                                proj_bottom == want_bottom,
                                _disp(proj_bottom), _disp(want_bottom)))
    return IdentityReport(checks)


# ------------------------------------------------------------- half-smashes

_CUBES: Dict[int, Dict[str, Tuple[int, Tuple[Tuple[int, str], ...]]]] = {
    1: {
        "Id": (1, ((1, "d0"), (-1, "d1"))),
        "d0": (0, ()),
        "d1": (0, ()),
    },
    2: {
        "Id": (2, ((-1, "d0"), (1, "d1"), (-1, "d2"))),
        "d0": (1, ((-1, "d0d1"), (1, "d0d2"))),
        "d1": (1, ((-1, "d0d1"), (1, "d1d2"))),
        "d2": (1, ((-1, "d0d2"), (1, "d1d2"))),
        "d0d1": (0, ()),
        "d0d2": (0, ()),
        "d1d2": (0, ()),
    },
}

_CUBE_LABEL_ORDER = {1: ("Id", "d0", "d1"),
                     2: ("Id", "d0", "d1", "d2", "d0d1", "d0d2", "d1d2")}


@dataclass
class HalfSmashModel:
    """Free DGL model of a sphere or disk crossed with a low cube, collapsed
    along the cube's basepoint: one labeled generator per (cell, cube face).
    """
    source: SphereDisk
    cube: int
    presentation: DgPresentation
    labels: Tuple[str, ...]

    def generator(self, cell: str, label: str):
        return self.presentation.algebra.gen(_smash_name(cell, label))

    def validate(self, cap: int):
        return self.presentation.validate(cap)


def _smash_name(cell: str, label: str) -> str:
    return f"({cell},({label}))"


def _relabel(algebra, element, images, zero):
    out = zero
    for word, coeff in element.terms.items():
        out = out + coeff * _relabel_word(algebra, word, images, zero)
    return out


def _relabel_word(algebra, word, images, zero):
    if len(word) == 1:
        return images[word[0]]
    left, right = algebra.split_word(word)
    l = _relabel(algebra, algebra.word_as_element(left), images, zero)
    r = _relabel(algebra, algebra.word_as_element(right), images, zero)
    return l.bracket(r)


def half_smash(s: SphereDisk, cube) -> HalfSmashModel:
    """The half-smash of a sphere or disk with the 1- or 2-cube.

    ``cube`` may be 1, 2, or a string like ``"D1"``/``"D[2]"``.  Generators
    are pairs (source generator, cube label); the differential combines the
    source differential (same label) with the signed cube boundary:
    d(g, L) = (dg, L) + (-1)^|g| * sum of the faces of L.
    """
    if isinstance(cube, str):
        digits = "".join(ch for ch in cube if ch.isdigit())
        cube = int(digits) if digits else -1
    if cube not in _CUBES:
        raise ValueError("cube must be the 1-cube or the 2-cube")
    table = _CUBES[cube]
    order = _CUBE_LABEL_ORDER[cube]
    source = s.presentation()

    gens = []
    for g in source.generators:
        for label in order:
            gens.append(Generator(_smash_name(g.name, label),
                                  g.degree + table[label][0]))
    algebra = FreeGradedLie(gens)
    differential = {}
    for g in source.generators:
        source_d = source.d_of_gen(g.name)
        for label in order:
            dim = table[label][0]
            value = algebra.zero()
            if not source_d.is_zero():
                images = {i: algebra.gen(_smash_name(h.name, label))
                          for i, h in enumerate(source.generators)}
                sign = -1 if dim % 2 else 1
                value = value + sign * _relabel(source.algebra, source_d,
                                                images, algebra.zero())
            for coeff, face_label in table[label][1]:
                value = value + coeff * algebra.gen(
                    _smash_name(g.name, face_label))
            if not value.is_zero():
                differential[_smash_name(g.name, label)] = value
    presentation = DgPresentation("DGL", gens, differential, algebra=algebra)
    return HalfSmashModel(s, cube, presentation, order)


# ----------------------------------------------------- secondary operation

class OperationUndefinedError(ValueError):
    """The chain-level system defining the operation has no admissible
    solution, so the operation is undefined (as opposed to nonvanishing)."""


@dataclass(frozen=True)
class OperationDatum:
    """What to feed the secondary operation: a cell of the resolution (a key
    into ``cells``, or an explicit ``(level, element)`` pair) and the images
    of the bottom-level sphere generators in the target."""
    cell: Union[str, tuple]
    images: Mapping[str, str]


class _LadderHomotopy:
    """Canonical chain homotopy between the two composites (evaluation after
    face 0, evaluation after face 1) on the part of level 1 that a cell's
    faces can reach.

    Values are produced degree by degree by solving d(h(g)) = e0(g) - e1(g)
    - h(dg) with the canonical particular solution; the kernel of each solve
    is the operation's per-generator indeterminacy.
    """

    def __init__(self, tower, target, cap, images, seeds):
        self.tower = tower
        self.target = target
        self.cap = cap
        self.level1 = tower.level(1)
        lvl0 = tower.level(0)
        values = {}
        for name in lvl0.gen_names:
            if name in images:
                values[name] = target.algebra.gen(images[name])
            else:
                values[name] = target.algebra.zero()
        self.f0 = DgMorphism(lvl0, target, values)
        problems = self.f0.check()
        if problems:
            raise OperationUndefinedError(
                f"the bottom comparison map is not a chain map: {problems[:3]}")
        lvl1 = self.level1
        vals0, vals1 = {}, {}
        for name in lvl1.gen_names:
            gen = lvl1.algebra.gen(name)
            vals0[name] = self.f0.apply(tower.face(1, 0).apply(gen))
            vals1[name] = self.f0.apply(tower.face(1, 1).apply(gen))
        self.e0 = DgMorphism(lvl1, target, vals0)
        self.e1 = DgMorphism(lvl1, target, vals1)

        def letters_of(element):
            out = set()
            for word in element.terms:
                for i in self._word_letters(word):
                    out.add(lvl1.algebra.generators[i].name)
            return out

        needed = set()
        for seed in seeds:
            needed |= letters_of(seed)
        d_letters = {n: letters_of(lvl1.d_of_gen(n)) for n in lvl1.gen_names
                     if lvl1.degree_of(n) <= cap}
        changed = True
        while changed:
            changed = False
            for n in list(needed):
                for m in d_letters.get(n, ()):
                    if m not in needed:
                        needed.add(m)
                        changed = True
            for n, dls in d_letters.items():
                if n not in needed and dls & needed:
                    needed.add(n)
                    changed = True
        self.names = sorted(needed, key=lambda n: (lvl1.degree_of(n), n))
        self.d_letters = d_letters
        self.values = {}
        self.touched = set()
        for name in self.names:
            value = self._solve(name, self.values)
            if value is None:
                raise OperationUndefinedError(
                    f"no homotopy value exists for {name}")
            self.values[name] = value

    def _word_letters(self, word):
        if word[0] == "g":
            return [word[1]]
        if isinstance(word[0], int):
            return list(word)
        out = []
        stack = [word]
        while stack:
            w = stack.pop()
            if w[0] == "g":
                out.append(w[1])
            elif w[0] == "p":
                stack.extend([w[1], w[2]])
            elif w[0] == "l":
                stack.extend(w[2])
        return out

    def _rhs(self, name, values):
        gen = self.level1.algebra.gen(name)
        out = self.e0.apply(gen) - self.e1.apply(gen)
        for word, coeff in self.level1.d_of_gen(name).terms.items():
            # level differentials are linear in the wrap generators
            index = word[1] if word[0] == "g" else word[0]
            letter = self.level1.algebra.generators[index].name
            out = out - coeff * values[letter]
        return out

    def _solve(self, name, values):
        rhs = self._rhs(name, values)
        if rhs.is_zero():
            return self.target.zero()
        degree = self.level1.degree_of(name) + 1
        matrix = self.target.d_matrix(degree)
        vector = self.target.vector_of(rhs, degree - 1)
        solution = matrix.solve(vector)
        if solution is None:
            return None
        return self.target.element_from_vector(degree, solution)

    # -- evaluation against a value assignment ------------------------------

    def evaluate(self, element, values=None):
        values = self.values if values is None else values
        out = self.target.zero()
        for word, coeff in element.terms.items():
            out = out + coeff * self._evaluate_word(word, values)
        return out

    def _evaluate_word(self, word, values):
        algebra = self.level1.algebra
        if algebra.is_basis_word(word) and len(word) == 1:
            name = algebra.generators[word[0]].name
            self.touched.add(name)
            return values[name]
        left, right = algebra.split_word(word)
        left_e = algebra.word_as_element(left)
        right_e = algebra.word_as_element(right)
        h_left = self.evaluate(left_e, values)
        h_right = self.evaluate(right_e, values)
        sign = -1 if algebra.word_degree(left) % 2 else 1
        return (h_left.bracket(self.e1.apply(right_e))
                + sign * self.e0.apply(left_e).bracket(h_right))

    def assemble(self, faces):
        """Alternating sum of the homotopy over the cell's faces, plus the
        set of level-1 generators its evaluation actually consumed."""
        self.touched = set()
        value = self.target.zero()
        for i, face_value in enumerate(faces):
            value = value + (-1) ** i * self.evaluate(face_value)
        return value, set(self.touched)

    def sweep_directions(self, faces, base_value, touched, cap):
        """Classes by which admissible alternative homotopy choices can move
        the assembled value.  Every consumed generator is shifted by every
        cycle of the appropriate degree; dependent generators above it are
        re-solved, and shifts that break some later solve are discarded."""
        lvl1 = self.level1
        if not touched:
            return []
        max_degree = max(lvl1.degree_of(n) for n in touched)
        parents = {n: set() for n in self.names}
        for n in self.names:
            for m in self.d_letters.get(n, ()):
                if m in parents:
                    parents[m].add(n)

        def dependents(name):
            out, todo = set(), [name]
            while todo:
                m = todo.pop()
                for p in parents.get(m, ()):
                    if p not in out:
                        out.add(p)
                        todo.append(p)
            return out

        directions = []
        for gname in self.names:
            gdeg = lvl1.degree_of(gname)
            if gdeg > max_degree:
                continue
            above = dependents(gname)
            matrix = self.target.d_matrix(gdeg + 1)
            for kernel_vector in matrix.kernel_basis():
                kappa = self.target.element_from_vector(gdeg + 1, kernel_vector)
                shifted = dict(self.values)
                shifted[gname] = shifted[gname] + kappa
                admissible = True
                for other in self.names:
                    if lvl1.degree_of(other) <= gdeg or other not in above:
                        continue
                    value = self._solve(other, shifted)
                    if value is None:
                        admissible = False
                        break
                    shifted[other] = value
                if not admissible:
                    continue
                moved = self.target.zero()
                for i, face_value in enumerate(faces):
                    moved = moved + (-1) ** i * self.evaluate(face_value, shifted)
                delta = moved - base_value
                cls = self.target.homology_class_of(delta, cap)
                if not cls.is_zero:
                    directions.append(cls)
        return directions


def secondary_operation(target: DgPresentation, resolution: StoverResolution,
                        datum: OperationDatum, cap: int) -> HigherOperationValue:
    """Evaluate the secondary operation attached to a closed cell.

    A bottom comparison map is extended over the cell's faces by a canonical
    chain homotopy; the alternating face sum is then a cycle in the target
    whose class is the operation's value.  ``indeterminacy`` collects the
    classes by which other admissible homotopy choices can move the value,
    and ``vanishes`` reports whether zero lies in value + span(indeterminacy).

    Raises :class:`OperationUndefinedError` when no admissible homotopy
    exists at all.
    """
    if target.flavor != "DGL":
        raise ValueError("the operation is defined for bracket-only (DGL) "
                         "resolutions")
    if isinstance(datum.cell, str):
        level, cell = resolution.cells[datum.cell]
    else:
        level, cell = datum.cell
    tower = resolution.tower
    if not tower.level(level).d_element(cell).is_zero():
        raise ValueError("the operation needs a closed cell")
    faces = [tower.face(level, i).apply(cell) for i in range(level + 1)]
    ladder = _LadderHomotopy(tower, target, cap, dict(datum.images), faces)
    value, touched = ladder.assemble(faces)
    base = target.homology_class_of(value, cap)
    if base.status == "not-a-cycle":
        raise OperationUndefinedError("the assembled value is not a cycle")
    directions = ladder.sweep_directions(faces, value, touched, cap)

    if base.is_zero:
        vanishes = True
    elif directions:
        size = len(base.coefficients)
        columns = [{i: c for i, c in enumerate(d.coefficients) if c}
                   for d in directions]
        matrix = SparseMatrix.from_columns(columns, size)
        wanted = {i: -c for i, c in enumerate(base.coefficients) if c}
        vanishes = matrix.solve(wanted) is not None
    else:
        vanishes = False
    return HigherOperationValue(classes=(base,), vanishes=vanishes,
                                indeterminacy=tuple(directions))


# ------------------------------------------------------------ Moore shadow

@dataclass
class ShadowReport:
    """Homotopy of the levelwise-homology simplicial object, in coordinates:
    pi0 per internal degree, and the higher groups (n, degree) -> dimension.
    ``base_dims`` is what pi0 should reproduce."""
    base_dims: Dict[int, int]
    pi0: Dict[int, int]
    higher: Dict[Tuple[int, int], int]

    @property
    def ok(self) -> bool:
        return (self.pi0 == self.base_dims
                and all(v == 0 for v in self.higher.values()))


def homotopy_shadow(base: DgPresentation, internal_cap: int = 3,
                    depth: int = 2) -> ShadowReport:
    """Moore-complex homotopy of the levelwise homology of the resolution
    tower over ``base``.

    Levels 0..depth+1 are built with the uniform cap ``internal_cap + 1``
    (the smallest cap for which homology through ``internal_cap`` is
    faithful levelwise), homology representatives are transported along the
    face maps by exact linear algebra, and the normalized chain complex
    N_n = ker d_1 cap ... cap ker d_n with boundary d_0 is read off
    degreewise.  For an acyclic resolution, pi0 reproduces the homology of
    the base and everything higher is zero.
    """
    levels_needed = depth + 2
    tower = SimplicialTower(base, (internal_cap + 1,) * levels_needed)
    report_base = {d: dim for d, dim in enumerate(
        base.homology(internal_cap).dims(), start=1)}

    pi0: Dict[int, int] = {}
    higher: Dict[Tuple[int, int], int] = {}
    for degree in range(1, internal_cap + 1):
        h = {}
        reps = {}
        for n in range(levels_needed):
            dh = tower.level(n)._degree_homology(degree)
            h[n] = dh.dim
            reps[n] = dh.representatives
        # face maps on homology, as coordinate columns
        F = {}
        for n in range(1, levels_needed):
            for i in range(n + 1):
                columns = []
                for rep in reps[n]:
                    image = tower.face(n, i).apply(rep)
                    cls = tower.level(n - 1).homology_class_of(image, degree)
                    if cls.status == "not-a-cycle":
                        raise ArithmeticError("face map broke a cycle")
                    coeffs = cls.coefficients or (Fraction(0),) * h[n - 1]
                    columns.append({r: c for r, c in enumerate(coeffs) if c})
                F[(n, i)] = columns
        # normalized subspaces and the boundary they carry
        kernels = {}
        for n in range(1, levels_needed):
            rows = h[n - 1]
            stacked = []
            for j in range(h[n]):
                column = {}
                for i in range(1, n + 1):
                    for r, c in F[(n, i)][j].items():
                        column[(i - 1) * rows + r] = c
                stacked.append(column)
            kernels[n] = SparseMatrix.from_columns(
                stacked, rows * n).kernel_basis() if h[n] else []

        def boundary_columns(n):
            out = []
            for kappa in kernels[n]:
                column: Dict[int, Fraction] = {}
                for j, coeff in kappa.items():
                    for r, c in F[(n, 0)][j].items():
                        column[r] = column.get(r, Fraction(0)) + coeff * c
                out.append({r: c for r, c in column.items() if c})
            return out

        image_rank = {n: SparseMatrix.from_columns(boundary_columns(n), h[n - 1]).rank()
                      for n in range(1, levels_needed)}
        pi0[degree] = h[0] - image_rank[1]
        for n in range(1, depth + 1):
            cycle_dim = len(kernels[n]) - image_rank[n]
            higher[(n, degree)] = cycle_dim - image_rank[n + 1]
    return ShadowReport(base_dims=report_base, pi0=pi0, higher=higher)


# ------------------------------------------------------------------ corpus

@dataclass
class CorpusEntry:
    step: int
    name: str
    ok: bool
    detail: str = ""


@dataclass
class CorpusReport:
    entries: List[CorpusEntry]
    elapsed: float

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    def summary(self) -> str:
        lines = []
        for e in self.entries:
            mark = "ok  " if e.ok else "FAIL"
            suffix = f": {e.detail}" if (e.detail and not e.ok) else ""
            lines.append(f"{mark} [step {e.step}] {e.name}{suffix}")
        passed = sum(1 for e in self.entries if e.ok)
        lines.append(f"{passed}/{len(self.entries)} assertions hold "
                     f"({self.elapsed:.1f}s)")
        return "\n".join(lines)


class _CorpusContext:
    """Shared lazily-built objects for the corpus assertions."""

    def __init__(self, cap: int):
        self.cap = cap
        self._cache: Dict[str, object] = {}

    def _get(self, key, builder):
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    def base(self, key: str) -> DgPresentation:
        builders = {"B": quadratic_example, "Bprime": perturbed_example,
                    "G": jacobi_example, "B4": jacobi_lie_shadow}
        return self._get(f"base:{key}", builders[key])

    def resolution(self, key: str) -> StoverResolution:
        builders = {"B": example_resolution_B,
                    "Bprime": example_resolution_Bprime,
                    "G": jacobi_resolution}
        return self._get(f"res:{key}", lambda: builders[key](self.cap))

    def shadow(self) -> LambdaShadow:
        return self._get("shadow", lambda: LambdaShadow(
            self.resolution("G").tower, jacobi_lie_shadow()))

    def homology_algebra(self):
        from .models import GradedAlgebraPresentation

        def build():
            gens = [Generator("a", 1), Generator("b", 1), Generator("c", 2)]
            alg = FreeGradedLie(gens)
            a, b, c = alg.gen("a"), alg.gen("b"), alg.gen("c")
            return GradedAlgebraPresentation(
                "GLA", gens,
                [a.bracket(a), c.bracket(a).bracket(b.bracket(a))],
                algebra=alg)
        return self._get("homology-algebra", build)

    def bigraded(self):
        from .models import bigraded_model
        return self._get("bigraded",
                         lambda: bigraded_model(self.homology_algebra(),
                                                self.cap))

    def filtered(self):
        from .models import filtered_model
        return self._get("filtered",
                         lambda: filtered_model(self.bigraded(),
                                                perturbed_example(), self.cap))


def _cell_of(ctx, spec):
    res = ctx.resolution(spec["resolution"])
    level, element = res.cells[spec["cell"]]
    return res, level, element


def _recipe_validate(ctx, spec):
    p = ctx.base(spec["base"])
    report = p.validate(spec.get("cap", ctx.cap))
    detail = "; ".join(i.detail for i in report.issues[:3])
    return report.ok, detail


def _recipe_differential_display(ctx, spec):
    got = ctx.base(spec["base"]).d_of_gen(spec["generator"]).display()
    return got == spec["expected"], f"{got!r} vs {spec['expected']!r}"


def _recipe_homology_dims(ctx, spec):
    got = ctx.base(spec["base"]).homology(spec.get("cap", ctx.cap)).dims()
    return got == spec["expected"], f"{got} vs {spec['expected']}"


def _recipe_cell_display(ctx, spec):
    _, _, element = _cell_of(ctx, spec)
    got = element.display()
    return got == spec["expected"], f"{got!r} vs {spec['expected']!r}"


def _recipe_cell_closed(ctx, spec):
    res, level, element = _cell_of(ctx, spec)
    boundary = res.level(level).d_element(element)
    return boundary.is_zero(), f"d = {boundary.display()}"


def _recipe_attachment(ctx, spec):
    res = ctx.resolution(spec["resolution"])
    failure = res.attachment_failure(spec["cell"])
    return failure is None, failure or ""


def _recipe_face_display(ctx, spec):
    res, level, element = _cell_of(ctx, spec)
    got = res.face(level, spec["face"]).apply(element).display()
    return got == spec["expected"], f"{got!r} vs {spec['expected']!r}"


def _recipe_face_zero(ctx, spec):
    res, level, element = _cell_of(ctx, spec)
    got = res.face(level, spec["face"]).apply(element)
    return got.is_zero(), f"face = {got.display()}"


def _recipe_face_is_base_differential(ctx, spec):
    res, level, element = _cell_of(ctx, spec)
    got = res.face(level, spec["face"]).apply(element)
    want = res.tower.wrap(0, res.base.d_of_gen(spec["generator"]))
    return got == want, f"{got.display()!r} vs {want.display()!r}"


def _recipe_alternating_faces(ctx, spec):
    res = ctx.resolution(spec["resolution"])
    total = res.level(0).zero()
    for sign, key in zip(spec["signs"], spec["cells"]):
        level, element = res.cells[key]
        total = total + sign * res.face(level, spec.get("face", 1)).apply(element)
    want = res.tower.wrap(0, res.base.d_of_gen(spec["generator"]))
    return total == want, f"{total.display()!r} vs {want.display()!r}"


def _recipe_simplicial_identities(ctx, spec):
    res = ctx.resolution(spec["resolution"])
    problems = res.tower.simplicial_identity_failures(
        spec["level"], degeneracies=spec.get("degeneracies", False))
    return not problems, "; ".join(problems[:3])


def _recipe_tower_validates(ctx, spec):
    res = ctx.resolution(spec["resolution"])
    n = spec["level"]
    report = res.level(n).validate(res.tower.caps[n])
    return report.ok, "; ".join(i.detail for i in report.issues[:3])


def _recipe_bigraded_bidegrees(ctx, spec):
    got = {name: list(bd) for name, bd in ctx.bigraded().bidegrees.items()}
    return got == spec["expected"], f"{got} vs {spec['expected']}"


def _recipe_bigraded_differential_display(ctx, spec):
    got = ctx.bigraded().underlying.d_of_gen(spec["generator"]).display()
    return got == spec["expected"], f"{got!r} vs {spec['expected']!r}"


def _recipe_filtered_support(ctx, spec):
    got = sorted(ctx.filtered().perturbation)
    return got == spec["expected"], f"{got} vs {spec['expected']}"


def _recipe_filtered_perturbation_display(ctx, spec):
    got = ctx.filtered().perturbation[spec["generator"]].display()
    return got == spec["expected"], f"{got!r} vs {spec['expected']!r}"


def _recipe_perturbation_system(ctx, spec):
    from .models import extract_assignment, perturbation_system
    system = perturbation_system(ctx.bigraded(), ctx.cap)
    if spec["assignment"] == "zero":
        assignment = {}
    else:
        assignment = extract_assignment(ctx.filtered())
    failures = system.evaluate(assignment)
    return not failures, f"{len(failures)} equations violated"


def _recipe_operation(ctx, spec):
    res = ctx.resolution(spec["resolution"])
    target = res.base
    cap = spec.get("cap", ctx.cap)
    datum = OperationDatum(cell=spec["cell"], images=spec["images"])
    value = secondary_operation(target, res, datum, cap)
    expected = io.parse_element(target.algebra, target.flavor,
                                spec["expected_class"])
    want = target.homology_class_of(expected, cap)
    got = value.classes[0]
    ok = got == want and value.vanishes == spec["vanishes"]
    return ok, (f"class {got.coefficients} vs {want.coefficients}, "
                f"vanishes {value.vanishes} vs {spec['vanishes']}")


def _recipe_half_smash_boundary(ctx, spec):
    s = SphereDisk(spec["kind"], spec["dimension"],
                   spec.get("generator", "x"), spec.get("boundary"))
    model = half_smash(s, spec["cube"])
    name = _smash_name(spec.get("generator", "x"), spec["label"])
    got = model.presentation.d_of_gen(name).display()
    return got == spec["expected"], f"{got!r} vs {spec['expected']!r}"


def _recipe_half_smash_validates(ctx, spec):
    s = SphereDisk(spec["kind"], spec["dimension"],
                   spec.get("generator", "x"), spec.get("boundary"))
    model = half_smash(s, spec["cube"])
    report = model.validate(spec.get("cap", 8))
    return report.ok, "; ".join(i.detail for i in report.issues[:3])


def _recipe_projection_vanishes(ctx, spec):
    res = ctx.resolution("G")
    level, element = res.cells[spec["cell"]]
    got = ctx.shadow().project(level, element)
    return got.is_zero(), f"projected to {got.display()}"


def _recipe_projection_display(ctx, spec):
    res = ctx.resolution("G")
    level, element = res.cells[spec["cell"]]
    got = ctx.shadow().project(level, element).display()
    return got == spec["expected"], f"{got!r} vs {spec['expected']!r}"


def _recipe_projection_chain_map(ctx, spec):
    bad = ctx.shadow().commutes_with_differential(spec["level"])
    return not bad, ", ".join(bad[:4])


_RECIPES = {
    "validate": _recipe_validate,
    "differential_display": _recipe_differential_display,
    "homology_dims": _recipe_homology_dims,
    "cell_display": _recipe_cell_display,
    "cell_closed": _recipe_cell_closed,
    "attachment": _recipe_attachment,
    "face_display": _recipe_face_display,
    "face_zero": _recipe_face_zero,
    "face_is_base_differential": _recipe_face_is_base_differential,
    "alternating_faces": _recipe_alternating_faces,
    "simplicial_identities": _recipe_simplicial_identities,
    "tower_validates": _recipe_tower_validates,
    "bigraded_bidegrees": _recipe_bigraded_bidegrees,
    "bigraded_differential_display": _recipe_bigraded_differential_display,
    "filtered_support": _recipe_filtered_support,
    "filtered_perturbation_display": _recipe_filtered_perturbation_display,
    "perturbation_system": _recipe_perturbation_system,
    "operation": _recipe_operation,
    "half_smash_boundary": _recipe_half_smash_boundary,
    "half_smash_validates": _recipe_half_smash_validates,
    "projection_vanishes": _recipe_projection_vanishes,
    "projection_display": _recipe_projection_display,
    "projection_chain_map": _recipe_projection_chain_map,
}


def _load_step(step: int) -> dict:
    path = resources.files(__package__).joinpath("data", "corpus",
                                                 f"step{step}.json")
    return json.loads(path.read_text())


def run_corpus(cap: int = 7, steps: Optional[Sequence[int]] = None
               ) -> CorpusReport:
    """Run the frozen assertion corpus (steps 1-6) at the given cap."""
    steps = list(steps) if steps is not None else [1, 2, 3, 4, 5, 6]
    started = time.time()
    ctx = _CorpusContext(cap)
    entries: List[CorpusEntry] = []
    for step in steps:
        document = _load_step(step)
        if document.get("schema") != 1:
            raise ValueError(f"unsupported corpus schema in step {step}")
        for assertion in document["assertions"]:
            recipe = _RECIPES[assertion["recipe"]]
            try:
                ok, detail = recipe(ctx, assertion)
            except Exception as exc:  # a crash is a failed assertion
                ok, detail = False, f"{type(exc).__name__}: {exc}"
            entries.append(CorpusEntry(step, assertion["name"], ok, detail))
    return CorpusReport(entries, elapsed=time.time() - started)
