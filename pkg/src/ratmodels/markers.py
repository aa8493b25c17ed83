"""Levelwise-free simplicial towers built from marker generators.

A tower over a free differential graded base (Lie or nonassociative
flavor) puts, at level ``n``, one fresh generator ``<m>`` for every basis
word ``m`` of the level below (level ``-1`` being the base itself), up to
a per-level degree cap.  The differential is inherited linearly,
``d<m> = <dm>``, so every level is a free algebra with a differential
that sends generators to linear combinations of generators.

Face maps peel one marker: the zeroth face erases the outer marker
(evaluating the generator to the word it wraps), the ``i``-th face for
``i >= 1`` pushes the ``(i-1)``-st face of the level below through the
marker.  Degeneracies repeat a marker in the same pattern.  All of these
are algebra maps, so they are recorded as :class:`~.dg.DgMorphism`
objects determined by generator values.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

from .dg import DgMorphism, DgPresentation, free_algebra
from .lie import Generator

__all__ = ["SimplicialTower", "stover_level"]


class SimplicialTower:
    """Simplicial object of free DG algebras over ``base``.

    ``caps[n]`` bounds the generator degrees kept at level ``n``; the caps
    must be non-increasing so that every wrapped word has its differential
    available one level down.  Levels are built lazily.
    """

    def __init__(self, base: DgPresentation, caps: Sequence[int]):
        if base.flavor not in ("DGL", "DGN"):
            raise ValueError(f"tower base must be DGL or DGN, got {base.flavor}")
        caps = tuple(int(c) for c in caps)
        if not caps:
            raise ValueError("tower needs at least one level cap")
        if any(c < 1 for c in caps):
            raise ValueError("level caps must be positive")
        if any(caps[i + 1] > caps[i] for i in range(len(caps) - 1)):
            raise ValueError(f"level caps must be non-increasing, got {caps}")
        self.base = base
        self.caps = caps
        self._levels: List[DgPresentation] = []
        # Per level: basis word of the parent -> name of its wrap generator.
        self._wrap_names: List[Dict[object, str]] = []
        self._parent_words: List[Dict[str, object]] = []
        self._faces: Dict[Tuple[int, int], DgMorphism] = {}
        self._degeneracies: Dict[Tuple[int, int], DgMorphism] = {}
        self._augmentation: Optional[DgMorphism] = None

    @property
    def depth(self) -> int:
        """Number of levels available (levels are indexed 0..depth-1)."""
        return len(self.caps)

    def parent(self, n: int) -> DgPresentation:
        """The presentation whose words level ``n`` wraps."""
        return self.base if n == 0 else self.level(n - 1)

    def level(self, n: int) -> DgPresentation:
        if not 0 <= n < self.depth:
            raise ValueError(f"level {n} out of range for tower of depth {self.depth}")
        while len(self._levels) <= n:
            self._build_level(len(self._levels))
        return self._levels[n]

    def _build_level(self, n: int) -> None:
        parent = self.base if n == 0 else self._levels[n - 1]
        cap = self.caps[n]
        names: Dict[object, str] = {}
        gens: List[Generator] = []
        for degree in range(1, cap + 1):
            for word in parent.basis(degree):
                name = "<" + parent.display_key(word) + ">"
                names[word] = name
                gens.append(Generator(name, degree))
        algebra = free_algebra(self.base.flavor, gens)
        differential = {}
        for word, name in names.items():
            image = parent.d_key(word)
            value = algebra.zero()
            for inner_word, coeff in image.terms.items():
                value = value + coeff * algebra.gen(names[inner_word])
            differential[name] = value
        level = DgPresentation(self.base.flavor, gens, differential, algebra=algebra)
        self._levels.append(level)
        self._wrap_names.append(names)

    def wrap_name(self, n: int, word) -> str:
        """Name of the level-``n`` generator wrapping the given parent word."""
        self.level(n)
        try:
            return self._wrap_names[n][word]
        except KeyError:
            parent = self.parent(n)
            raise ValueError(
                f"no level-{n} wrap for {parent.display_key(word)!r}: "
                f"degree exceeds cap {self.caps[n]}"
            ) from None

    def wrap(self, n: int, element):
        """Linear extension of ``m -> <m>`` from parent elements to level ``n``."""
        level = self.level(n)
        out = level.algebra.zero()
        for word, coeff in element.terms.items():
            out = out + coeff * level.algebra.gen(self.wrap_name(n, word))
        return out

    def parent_word(self, n: int, name: str):
        """The parent basis word wrapped by the level-``n`` generator ``name``."""
        self.level(n)
        if len(self._parent_words) <= n or len(self._parent_words[n]) != len(self._wrap_names[n]):
            while len(self._parent_words) <= n:
                self._parent_words.append({})
            self._parent_words[n] = {nm: w for w, nm in self._wrap_names[n].items()}
        try:
            return self._parent_words[n][name]
        except KeyError:
            raise ValueError(f"{name!r} is not a level-{n} generator") from None

    def augmentation(self) -> DgMorphism:
        """Evaluation of level 0 onto the base (erase the single marker)."""
        if self._augmentation is None:
            level = self.level(0)
            values = {
                name: self.base.algebra.word_as_element(word)
                for word, name in self._wrap_names[0].items()
            }
            self._augmentation = DgMorphism(level, self.base, values)
        return self._augmentation

    def face(self, n: int, i: int) -> DgMorphism:
        """The ``i``-th face map from level ``n`` to level ``n - 1``."""
        if not 1 <= n < self.depth:
            raise ValueError(f"faces start at level 1, got level {n}")
        if not 0 <= i <= n:
            raise ValueError(f"level {n} has faces 0..{n}, got {i}")
        key = (n, i)
        if key not in self._faces:
            source = self.level(n)
            target = self.level(n - 1)
            names = self._wrap_names[n]
            values = {}
            if i == 0:
                for word, name in names.items():
                    values[name] = target.algebra.word_as_element(word)
            else:
                inner = self.augmentation() if n == 1 else self.face(n - 1, i - 1)
                for word, name in names.items():
                    unwrapped = target.algebra.word_as_element(word)
                    values[name] = self.wrap(n - 1, inner.apply(unwrapped))
            self._faces[key] = DgMorphism(source, target, values)
        return self._faces[key]

    def degeneracy(self, n: int, j: int) -> DgMorphism:
        """The ``j``-th degeneracy from level ``n`` to level ``n + 1``.

        Only available when the two caps agree, since repeating a marker
        must not push a generator past the upper level's cap.
        """
        if not 0 <= n < self.depth - 1:
            raise ValueError(f"degeneracies need level {n + 1}, tower depth {self.depth}")
        if not 0 <= j <= n:
            raise ValueError(f"level {n} has degeneracies 0..{n}, got {j}")
        if self.caps[n + 1] != self.caps[n]:
            raise ValueError(
                f"degeneracy needs caps[{n}] == caps[{n + 1}], "
                f"got {self.caps[n]} != {self.caps[n + 1]}"
            )
        key = (n, j)
        if key not in self._degeneracies:
            source = self.level(n)
            target = self.level(n + 1)
            names = self._wrap_names[n]
            values = {}
            if j == 0:
                for word, name in names.items():
                    values[name] = self.wrap(n + 1, source.algebra.gen(name))
            else:
                parent = self.level(n - 1)
                inner = self.degeneracy(n - 1, j - 1)
                for word, name in names.items():
                    unwrapped = parent.algebra.word_as_element(word)
                    values[name] = self.wrap(n + 1, inner.apply(unwrapped))
            self._degeneracies[key] = DgMorphism(source, target, values)
        return self._degeneracies[key]

    def simplicial_identity_failures(self, n: int, degeneracies: bool = False) -> List[str]:
        """Check the simplicial identities on every generator of level ``n``.

        Face-face identities are checked for ``n >= 1`` (at ``n == 1`` the
        role of the missing second face is played by the augmentation);
        set ``degeneracies`` to also check the face-degeneracy and
        degeneracy-degeneracy identities, which require matching caps.
        """
        problems: List[str] = []
        level = self.level(n)

        def compare(tag: str, left, right) -> None:
            for name in level.gen_names:
                x = level.algebra.gen(name)
                if left(x) != right(x):
                    problems.append(f"{tag} fails on {name}")

        if n == 1:
            aug = self.augmentation()
            compare(
                "aug d0 = aug d1",
                lambda x: aug.apply(self.face(1, 0).apply(x)),
                lambda x: aug.apply(self.face(1, 1).apply(x)),
            )
        elif n >= 2:
            for j in range(n + 1):
                for i in range(j):
                    compare(
                        f"d{i} d{j} = d{j - 1} d{i}",
                        lambda x, i=i, j=j: self.face(n - 1, i).apply(self.face(n, j).apply(x)),
                        lambda x, i=i, j=j: self.face(n - 1, j - 1).apply(self.face(n, i).apply(x)),
                    )
        if degeneracies and n + 1 < self.depth:
            for j in range(n + 1):
                s_j = self.degeneracy(n, j)
                for i in range(n + 2):
                    if i == j or i == j + 1:
                        compare(
                            f"d{i} s{j} = id",
                            lambda x, i=i, s_j=s_j: self.face(n + 1, i).apply(s_j.apply(x)),
                            lambda x: x,
                        )
                    elif i < j:
                        compare(
                            f"d{i} s{j} = s{j - 1} d{i}",
                            lambda x, i=i, s_j=s_j: self.face(n + 1, i).apply(s_j.apply(x)),
                            lambda x, i=i, j=j: self.degeneracy(n - 1, j - 1).apply(
                                self.face(n, i).apply(x)
                            ),
                        )
                    elif n >= 1:
                        compare(
                            f"d{i} s{j} = s{j} d{i - 1}",
                            lambda x, i=i, s_j=s_j: self.face(n + 1, i).apply(s_j.apply(x)),
                            lambda x, i=i, j=j: self.degeneracy(n - 1, j).apply(
                                self.face(n, i - 1).apply(x)
                            ),
                        )
                if n + 2 < self.depth:
                    for i in range(j + 1):
                        compare(
                            f"s{i} s{j} = s{j + 1} s{i}",
                            lambda x, i=i, j=j: self.degeneracy(n + 1, i).apply(
                                self.degeneracy(n, j).apply(x)
                            ),
                            lambda x, i=i, j=j: self.degeneracy(n + 1, j + 1).apply(
                                self.degeneracy(n, i).apply(x)
                            ),
                        )
        return problems

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"SimplicialTower(base={self.base.flavor}, caps={self.caps})"


def stover_level(b: DgPresentation, n: int, cap: int) -> DgPresentation:
    """Level ``n`` of the canonical tower over ``b`` with a uniform cap."""
    if n < 0:
        raise ValueError("level index must be nonnegative")
    return SimplicialTower(b, (cap,) * (n + 1)).level(n)
