"""Finite composition diagrams and their cubical path complexes.

A *lattice* here is a finite directed category without identities, with a
chosen initial and final object, a unique maximal arrow between them, and a
direct arrow from the initial object to everything (and from everything to
the final object).  The path complex W(u, v) glues one (k-1)-cube per
k-chain of arrows: setting an interior coordinate to 0 composes the two
adjacent arrows, while setting it to 1 leaves a free face that remembers
the broken composite.  Cells are therefore (chain, set of cut positions)
pairs, and the complex of broken composites ("basis") is the subcomplex of
cells with at least one cut.

The cone verification backs the statement that W(init, fin) collapses to
the vertex given by the maximal arrow: it computes reduced rational
homology and exhibits an explicit acyclic matching.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .linalg import SparseMatrix


@dataclass(frozen=True)
class Arrow:
    name: str
    source: str
    target: str


@dataclass(frozen=True)
class Cell:
    """One cube of a path complex: a composable chain of arrow names plus
    the set of junctions pinned at 1.  Junctions are numbered 1..k-1 for a
    k-arrow chain; the dimension is the number of unpinned junctions."""
    chain: tuple[str, ...]
    cuts: frozenset[int] = frozenset()

    @property
    def dim(self) -> int:
        return len(self.chain) - 1 - len(self.cuts)

    def display(self) -> str:
        parts = [self.chain[0]]
        for i, arrow in enumerate(self.chain[1:], start=1):
            parts.append("|" if i in self.cuts else "~")
            parts.append(arrow)
        return "".join(parts)


class LatticeError(ValueError):
    pass


class Lattice:
    """Validated composition diagram.

    ``compose`` maps pairs of arrow names (f, g) with target(f) =
    source(g) to the name of the composite arrow "f then g".  The table
    must cover every composable pair and be associative.
    """

    def __init__(self, objects: Sequence[str], init: str, fin: str,
                 arrows: Sequence[tuple[str, str, str]],
                 compose: Optional[dict[tuple[str, str], str]] = None):
        self.objects = tuple(objects)
        self.init = init
        self.fin = fin
        if len(set(self.objects)) != len(self.objects):
            raise LatticeError("duplicate object names")
        known = set(self.objects)
        for v, label in ((init, "initial"), (fin, "final")):
            if v not in known:
                raise LatticeError(f"{label} object {v!r} is not an object")
        if init == fin:
            raise LatticeError("initial and final objects must differ")
        self.arrows: dict[str, Arrow] = {}
        for name, source, target in arrows:
            if name in self.arrows:
                raise LatticeError(f"duplicate arrow name {name!r}")
            if source not in known or target not in known:
                raise LatticeError(f"arrow {name!r} has unknown endpoint")
            if source == target:
                raise LatticeError(f"arrow {name!r} is a loop")
            self.arrows[name] = Arrow(name, source, target)
        self.compose_table: dict[tuple[str, str], str] = dict(compose or {})
        self._validate()

    # ------------------------------------------------------------ validation

    def _validate(self) -> None:
        # acyclicity of the object graph under the arrows
        order: dict[str, int] = {}
        visiting: set[str] = set()

        def visit(v: str, stack: tuple[str, ...]) -> None:
            if v in order:
                return
            if v in visiting:
                cycle = stack[stack.index(v):] + (v,)
                raise LatticeError("cycle through objects " + " -> ".join(cycle))
            visiting.add(v)
            for a in self.arrows.values():
                if a.source == v:
                    visit(a.target, stack + (v,))
            visiting.discard(v)
            order[v] = len(order)

        for v in self.objects:
            visit(v, ())

        for (f, g), h in self.compose_table.items():
            for name in (f, g, h):
                if name not in self.arrows:
                    raise LatticeError(f"composition mentions unknown arrow {name!r}")
            af, ag, ah = self.arrows[f], self.arrows[g], self.arrows[h]
            if af.target != ag.source:
                raise LatticeError(f"{f!r} and {g!r} are not composable")
            if (ah.source, ah.target) != (af.source, ag.target):
                raise LatticeError(
                    f"composite of {f!r} and {g!r} should run "
                    f"{af.source} -> {ag.target}, but {h!r} does not")
        for f in self.arrows.values():
            for g in self.arrows.values():
                if f.target == g.source and (f.name, g.name) not in self.compose_table:
                    raise LatticeError(
                        f"missing composite of {f.name!r} and {g.name!r}")
        for f in self.arrows.values():
            for g in self.arrows.values():
                if f.target != g.source:
                    continue
                fg = self.compose_table[(f.name, g.name)]
                for h in self.arrows.values():
                    if g.target != h.source:
                        continue
                    gh = self.compose_table[(g.name, h.name)]
                    if self.compose_table[(fg, h.name)] != self.compose_table[(f.name, gh)]:
                        raise LatticeError(
                            "composition is not associative on "
                            f"({f.name!r}, {g.name!r}, {h.name!r})")

        maximal = [a for a in self.arrows.values()
                   if (a.source, a.target) == (self.init, self.fin)]
        if len(maximal) != 1:
            raise LatticeError(
                f"expected exactly one arrow {self.init} -> {self.fin}, "
                f"found {len(maximal)}")
        self.phi_max = maximal[0].name
        for w in self.objects:
            if w != self.init and not any(
                    a.source == self.init and a.target == w
                    for a in self.arrows.values()):
                raise LatticeError(f"no arrow from {self.init} to {w}")
            if w != self.fin and not any(
                    a.source == w and a.target == self.fin
                    for a in self.arrows.values()):
                raise LatticeError(f"no arrow from {w} to {self.fin}")

    # ----------------------------------------------------------- navigation

    def compose_pair(self, f: str, g: str) -> str:
        return self.compose_table[(f, g)]

    def chains(self, u: str, v: str, k: int) -> list[tuple[str, ...]]:
        """All composable sequences of exactly k arrows from u to v."""
        if k < 1:
            return []
        out: list[tuple[str, ...]] = []

        def extend(chain: tuple[str, ...], at: str) -> None:
            if len(chain) == k:
                if at == v:
                    out.append(chain)
                return
            for a in self.arrows.values():
                if a.source == at:
                    extend(chain + (a.name,), a.target)

        extend((), u)
        return sorted(out)

    def all_chains(self, u: str, v: str) -> list[tuple[str, ...]]:
        # a chain visits pairwise distinct objects, so its length is bounded
        return [chain for k in range(1, len(self.objects))
                for chain in self.chains(u, v, k)]


def chains(g: Lattice, u: str, v: str, k: int) -> list[tuple[str, ...]]:
    return g.chains(u, v, k)


# ---------------------------------------------------------------- complexes

class CubicalComplex:
    """Chain complex of cube cells with the alternating-face boundary."""

    def __init__(self, lattice: Lattice, cells: Sequence[Cell]):
        self.lattice = lattice
        self.cells_by_dim: dict[int, list[Cell]] = {}
        for cell in cells:
            self.cells_by_dim.setdefault(cell.dim, []).append(cell)
        for dim in self.cells_by_dim:
            self.cells_by_dim[dim].sort(key=lambda c: (c.chain, sorted(c.cuts)))
        self._index = {dim: {c: i for i, c in enumerate(cs)}
                       for dim, cs in self.cells_by_dim.items()}
        self._matrix_cache: dict[int, SparseMatrix] = {}

    @property
    def top_dim(self) -> int:
        return max(self.cells_by_dim, default=-1)

    def cells(self, dim: int) -> list[Cell]:
        return self.cells_by_dim.get(dim, [])

    def cell_counts(self) -> dict[int, int]:
        return {dim: len(cs) for dim, cs in sorted(self.cells_by_dim.items())}

    def euler_characteristic(self) -> int:
        return sum((-1) ** dim * len(cs)
                   for dim, cs in self.cells_by_dim.items())

    def has_cell(self, cell: Cell) -> bool:
        return cell in self._index.get(cell.dim, {})

    # ------------------------------------------------------------- boundary

    def free_positions(self, cell: Cell) -> list[int]:
        return [i for i in range(1, len(cell.chain))
                if i not in cell.cuts]

    def face(self, cell: Cell, position: int, end: int) -> Cell:
        """The face of a cell at one free junction; end 1 pins the junction,
        end 0 composes the adjacent arrows."""
        if end == 1:
            return Cell(cell.chain, cell.cuts | {position})
        composite = self.lattice.compose_pair(cell.chain[position - 1],
                                              cell.chain[position])
        chain = (cell.chain[:position - 1] + (composite,)
                 + cell.chain[position + 1:])
        cuts = frozenset(j if j < position else j - 1 for j in cell.cuts)
        return Cell(chain, cuts)

    def boundary(self, cell: Cell) -> dict[Cell, int]:
        out: dict[Cell, int] = {}
        for p, position in enumerate(self.free_positions(cell), start=1):
            sign = -1 if p % 2 == 0 else 1
            for end, end_sign in ((1, sign), (0, -sign)):
                face = self.face(cell, position, end)
                total = out.get(face, 0) + end_sign
                if total:
                    out[face] = total
                else:
                    out.pop(face, None)
        return out

    def boundary_matrix(self, dim: int) -> SparseMatrix:
        if dim not in self._matrix_cache:
            source = self.cells(dim)
            target = self._index.get(dim - 1, {})
            columns = []
            for cell in source:
                column = {}
                for face, coeff in self.boundary(cell).items():
                    if face not in target:
                        raise LatticeError(
                            f"face {face.display()} escapes the complex")
                    column[target[face]] = coeff
                columns.append(column)
            self._matrix_cache[dim] = SparseMatrix.from_columns(
                columns, len(self.cells(dim - 1)))
        return self._matrix_cache[dim]

    def boundary_squares_to_zero(self) -> bool:
        for dim in range(2, self.top_dim + 1):
            for cell in self.cells(dim):
                twice: dict[Cell, int] = {}
                for face, coeff in self.boundary(cell).items():
                    for deeper, inner in self.boundary(face).items():
                        total = twice.get(deeper, 0) + coeff * inner
                        if total:
                            twice[deeper] = total
                        else:
                            twice.pop(deeper, None)
                if twice:
                    return False
        return True

    def reduced_homology_dims(self, up_to: Optional[int] = None) -> list[int]:
        """Reduced rational homology dimensions in degrees 0..up_to."""
        top = self.top_dim if up_to is None else up_to
        dims = []
        for degree in range(0, top + 1):
            n = len(self.cells(degree))
            if degree == 0:
                # augmentation: the sum-of-coefficients functional
                augmentation = SparseMatrix.from_columns(
                    [{0: 1} for _ in range(n)], 1 if n else 0)
                cycle_rank = len(augmentation.kernel_basis())
            else:
                cycle_rank = len(self.boundary_matrix(degree).kernel_basis())
            boundary_rank = self.boundary_matrix(degree + 1).rank()
            dims.append(cycle_rank - boundary_rank)
        return dims


def w_complex(g: Lattice, u: str, v: str) -> CubicalComplex:
    cells = []
    for chain in g.all_chains(u, v):
        junctions = range(1, len(chain))
        for mask in range(1 << len(chain) - 1):
            cuts = frozenset(i for i in junctions if mask >> (i - 1) & 1)
            cells.append(Cell(chain, cuts))
    return CubicalComplex(g, cells)


def basis_complex(g: Lattice) -> CubicalComplex:
    full = w_complex(g, g.init, g.fin)
    cells = [c for dim in full.cells_by_dim
             for c in full.cells(dim) if c.cuts]
    return CubicalComplex(g, cells)


def concatenate(g: Lattice, left: Cell, right: Cell) -> Cell:
    """Categorical composition of path-complex cells: concatenation with the
    junction pinned at 1."""
    end = g.arrows[left.chain[-1]].target
    start = g.arrows[right.chain[0]].source
    if end != start:
        raise LatticeError(
            f"cells are not composable: {end} != {start}")
    shift = len(left.chain)
    cuts = set(left.cuts) | {shift} | {i + shift for i in right.cuts}
    return Cell(left.chain + right.chain, frozenset(cuts))


# -------------------------------------------------------------- cone check

@dataclass
class ConeReport:
    ok: bool
    homology: list[int]
    critical_cells: list[str]
    matching_acyclic: bool
    detail: str = ""

    def as_dict(self) -> dict:
        return {"ok": self.ok, "reduced_homology": self.homology,
                "critical_cells": self.critical_cells,
                "matching_acyclic": self.matching_acyclic,
                "detail": self.detail}


def _first_junction_matching(complex_: CubicalComplex):
    """Pair every cell of a multi-arrow chain with the cell differing in the
    first junction cut; single-arrow chains stay critical."""
    partner: dict[Cell, Cell] = {}
    critical: list[Cell] = []
    for dim in complex_.cells_by_dim:
        for cell in complex_.cells(dim):
            if len(cell.chain) == 1:
                critical.append(cell)
            elif 1 in cell.cuts:
                partner[cell] = Cell(cell.chain, cell.cuts - {1})
            else:
                partner[cell] = Cell(cell.chain, cell.cuts | {1})
    return partner, critical


def cone_check(g: Lattice) -> ConeReport:
    complex_ = w_complex(g, g.init, g.fin)
    problems = []

    if not complex_.boundary_squares_to_zero():
        problems.append("boundary does not square to zero")
    homology = complex_.reduced_homology_dims()
    if any(homology):
        problems.append(f"reduced homology {homology} does not vanish")

    partner, critical = _first_junction_matching(complex_)
    names = [c.display() for c in critical]
    if names != [g.phi_max]:
        problems.append(f"critical cells {names} are not the maximal chain")
    for cell, other in partner.items():
        if not complex_.has_cell(other) or partner.get(other) != cell:
            problems.append(f"matching is not an involution at {cell.display()}")
            break
        if abs(cell.dim - other.dim) != 1:
            problems.append(f"matching skips a dimension at {cell.display()}")
            break
        upper, lower = (cell, other) if cell.dim > other.dim else (other, cell)
        if abs(complex_.boundary(upper).get(lower, 0)) != 1:
            problems.append(f"matched pair {upper.display()} / "
                            f"{lower.display()} is not incident")
            break

    acyclic = _gradient_paths_acyclic(complex_, partner)
    if not acyclic:
        problems.append("gradient paths contain a cycle")

    return ConeReport(ok=not problems, homology=homology,
                      critical_cells=names, matching_acyclic=acyclic,
                      detail="; ".join(problems))


def _gradient_paths_acyclic(complex_: CubicalComplex,
                            partner: dict[Cell, Cell]) -> bool:
    for dim in sorted(complex_.cells_by_dim):
        graph: dict[Cell, list[Cell]] = {}
        for cell in complex_.cells(dim):
            up = partner.get(cell)
            if up is None or up.dim != dim + 1:
                continue
            edges = []
            for face, coeff in complex_.boundary(up).items():
                if face != cell and coeff:
                    other_up = partner.get(face)
                    if other_up is not None and other_up.dim == dim + 1:
                        edges.append(face)
            graph[cell] = edges
        state: dict[Cell, int] = {}

        def has_cycle(cell: Cell) -> bool:
            state[cell] = 1
            for nxt in graph.get(cell, []):
                mark = state.get(nxt)
                if mark == 1:
                    return True
                if mark is None and has_cycle(nxt):
                    return True
            state[cell] = 2
            return False

        for cell in graph:
            if cell not in state and has_cycle(cell):
                return False
    return True


# ---------------------------------------------------------------- operation

@dataclass(frozen=True)
class HigherOperationValue:
    """The value of a higher operation.

    ``classes`` holds the homology classes produced by the canonical
    chain-level choices; ``indeterminacy`` spans the directions in which
    other admissible choices can move those classes (so the full value set
    is ``classes + span(indeterminacy)``); ``vanishes`` records whether the
    zero class belongs to that set."""
    classes: tuple
    vanishes: bool
    indeterminacy: tuple = ()

    @classmethod
    def from_classes(cls, classes) -> "HigherOperationValue":
        classes = tuple(classes)
        return cls(classes=classes,
                   vanishes=any(getattr(c, "is_zero", False) for c in classes))


# ------------------------------------------------------------------ random

def random_lattice(rng: random.Random, max_objects: int = 6) -> Lattice:
    """A random valid lattice: a random bounded partial order (one arrow per
    comparable pair), sometimes with one doubled interior arrow whose
    composites agree with the original's."""
    n = rng.randint(2, max_objects)
    names = [f"o{i}" for i in range(n)]
    less: set[tuple[int, int]] = set()
    for j in range(1, n):
        less.add((0, j))
    for i in range(1, n - 1):
        less.add((i, n - 1))
    for i in range(1, n - 1):
        for j in range(i + 1, n - 1):
            if rng.random() < 0.5:
                less.add((i, j))
    changed = True
    while changed:
        changed = False
        for (i, j) in list(less):
            for (jj, k) in list(less):
                if jj == j and (i, k) not in less and i != k:
                    less.add((i, k))
                    changed = True

    def arrow_name(i: int, j: int) -> str:
        return f"a{i}_{j}"

    arrows = [(arrow_name(i, j), names[i], names[j]) for (i, j) in sorted(less)]
    compose = {}
    for (i, j) in less:
        for (jj, k) in less:
            if jj == j:
                compose[(arrow_name(i, j), arrow_name(j, k))] = arrow_name(i, k)

    interior = [(i, j) for (i, j) in less if (i, j) != (0, n - 1)]
    if interior and rng.random() < 0.4:
        i, j = interior[rng.randrange(len(interior))]
        doubled = f"b{i}_{j}"
        arrows.append((doubled, names[i], names[j]))
        for (f, g), h in list(compose.items()):
            if f == arrow_name(i, j):
                compose[(doubled, g)] = h
            if g == arrow_name(i, j):
                compose[(f, doubled)] = h
    return Lattice(names, names[0], names[-1], arrows, compose)
