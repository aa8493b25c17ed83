"""Reading and writing the text formats shared by the CLI and the corpus.

Three line-oriented formats live here.

* Graded presentations (``.dgl`` / ``.dga`` / ``.dgn``)::

      flavor: DGL
      connectivity: connected
      a : 1
      x : 3
      d x = [a,a]

* Coalgebra presentations (``.dgc``) add reduced-comultiplication lines
  ``dbar name = (left|right) - 2*(l2|r2)``; differential lines are linear
  combinations of cogenerator names.

* Annotation lines ``bidegree name = (p, q)`` may follow the generators of
  a graded presentation; they round-trip through a ``bidegrees`` dict on
  the parsed object.

* Lattices (``.lat``)::

      objects: u v w
      f : u -> v
      g : v -> w
      h : u -> w
      f.g = h

  The first object listed is initial and the last is final; ``f.g`` means
  "f then g".

``serialize`` output is canonical: parsing it and serializing again is
byte-identical.  ``#`` starts a comment; blank lines are ignored.
Names of the form ``lam<k>`` are reserved for the formal lambda words of
the DGN flavor and cannot be generator names.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import reduce
from pathlib import Path
from typing import Optional, Union

from .dg import FLAVORS, DgPresentation, free_algebra
from .lie import Generator
from .wcat import Lattice


class ParseError(ValueError):
    """A malformed input file, carrying the offending position."""

    def __init__(self, message: str, path: str = "<input>",
                 line: int = 0, column: int = 0):
        self.path = path
        self.line = line
        self.column = column
        self.bare_message = message
        super().__init__(f"{path}:{line}:{column}: {message}")


# ---------------------------------------------------------------- elements

_TOKEN = re.compile(
    r"(?P<space>\s+)"
    r"|(?P<number>\d+(?:/\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<sym>->|[\[\](),*+|.:=-])")

_LAM = re.compile(r"lam(\d+)$")


def _tokenize(text: str, path: str, line: int, base_column: int):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}",
                             path, line, base_column + pos)
        pos = m.end()
        if m.lastgroup == "space":
            continue
        tokens.append((m.lastgroup, m.group(), base_column + m.start()))
    return tokens


class _ElementParser:
    """Recursive-descent parser for one element expression."""

    def __init__(self, algebra, flavor: str, tokens, path: str, line: int,
                 linear: bool = False):
        self.algebra = algebra
        self.flavor = flavor
        self.tokens = tokens
        self.pos = 0
        self.path = path
        self.line = line
        self.linear = linear  # restrict atoms to bare generator names

    def fail(self, message: str):
        column = self.tokens[self.pos][2] if self.pos < len(self.tokens) \
            else (self.tokens[-1][2] + len(self.tokens[-1][1]) if self.tokens else 1)
        raise ParseError(message, self.path, self.line, column)

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, kind: Optional[str] = None, value: Optional[str] = None):
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of expression")
        if kind is not None and tok[0] != kind:
            self.fail(f"expected {value or kind}, found {tok[1]!r}")
        if value is not None and tok[1] != value:
            self.fail(f"expected {value!r}, found {tok[1]!r}")
        self.pos += 1
        return tok

    # expression := ['-'] chunk (('+'|'-') chunk)*
    def expression(self):
        sign = Fraction(1)
        tok = self.peek()
        if tok and tok[1] == "-":
            self.take()
            sign = Fraction(-1)
        value = self.chunk().scale(sign) if sign != 1 else self.chunk()
        while True:
            tok = self.peek()
            if tok is None or tok[1] not in "+-":
                return value
            self.take()
            nxt = self.chunk()
            value = value + nxt if tok[1] == "+" else value - nxt
        return value

    # chunk := number ['*' product] | product
    def chunk(self):
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of expression")
        if tok[0] == "number":
            coeff = Fraction(tok[1])
            self.take()
            nxt = self.peek()
            if nxt is not None and nxt[1] == "*":
                self.take()
                return self.product().scale(coeff)
            if coeff == 0:
                return self.algebra.zero()
            self.fail("a bare number is not an element (only 0 is)")
        return self.product()

    def product(self):
        value = self.atom()
        while True:
            tok = self.peek()
            if tok is None or tok[1] != "*":
                return value
            if self.flavor not in ("DGA", "GCA"):
                self.fail("products are only defined for the algebra flavor; "
                          "use brackets")
            self.take()
            value = value * self.atom()

    def atom(self):
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of expression")
        kind, text, _ = tok
        if kind == "name":
            lam = _LAM.match(text)
            if lam and not self.linear:
                return self.lam_word(int(lam.group(1)))
            self.take()
            try:
                return self.algebra.gen(text)
            except KeyError:
                self.pos -= 1
                self.fail(f"unknown generator {text!r}")
        if self.linear:
            self.fail("expected a generator name")
        if text == "[":
            self.take()
            left = self.expression()
            self.take(value=",")
            right = self.expression()
            self.take(value="]")
            return left.bracket(right)
        if text == "(":
            self.take()
            value = self.expression()
            self.take(value=")")
            return value
        self.fail(f"expected an element, found {text!r}")

    def lam_word(self, arity: int):
        if self.flavor != "DGN":
            self.fail("lambda words need the DGN flavor")
        self.take()  # the lamK name
        self.take(value="(")
        args = [self.expression()]
        while self.peek() is not None and self.peek()[1] == ",":
            self.take()
            args.append(self.expression())
        self.take(value=")")
        if len(args) != arity:
            self.fail(f"lam{arity} takes {arity} arguments, got {len(args)}")
        return self.algebra.lam(arity, args)

    def finish(self, value):
        if self.pos != len(self.tokens):
            self.fail("trailing input after element")
        return value


def parse_element(algebra, flavor: str, text: str, *, path: str = "<input>",
                  line: int = 0, base_column: int = 1):
    """One element of ``algebra`` from its display syntax."""
    tokens = _tokenize(text, path, line, base_column)
    if not tokens:
        raise ParseError("missing element", path, line, base_column)
    parser = _ElementParser(algebra, flavor, tokens, path, line)
    return parser.finish(parser.expression())


# ---------------------------------------------- presentations and lattices

def _significant_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if body.strip():
            yield lineno, body


_GEN_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(\d+)\s*$")
_D_LINE = re.compile(r"^\s*(d|dbar)\s+([A-Za-z_][A-Za-z0-9_]*)\s*=")
_HEADER = re.compile(r"^\s*(flavor|connectivity)\s*:\s*(\S+)\s*$")
_BIDEGREE_LINE = re.compile(
    r"^\s*bidegree\s+([A-Za-z_][A-Za-z0-9_]*)\s*=\s*"
    r"\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")
_ARROW_LINE = re.compile(
    r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*:\s*([A-Za-z_][A-Za-z0-9_]*)"
    r"\s*->\s*([A-Za-z_][A-Za-z0-9_]*)\s*$")
_COMPOSE_LINE = re.compile(
    r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*\.\s*([A-Za-z_][A-Za-z0-9_]*)"
    r"\s*=\s*([A-Za-z_][A-Za-z0-9_]*)\s*$")


def parse_presentation_text(text: str, path: str = "<input>"
                            ) -> Union[DgPresentation, Lattice]:
    lines = list(_significant_lines(text))
    if not lines:
        raise ParseError("empty input", path, 1, 1)
    first = lines[0][1].strip()
    if first.startswith("objects"):
        return _parse_lattice(lines, path)
    return _parse_graded(lines, path)


def parse_presentation(path) -> Union[DgPresentation, Lattice]:
    p = Path(path)
    return parse_presentation_text(p.read_text(), str(p))


def _parse_graded(lines, path: str) -> DgPresentation:
    flavor = None
    connectivity = "connected"
    gens: list[Generator] = []
    seen: dict[str, int] = {}
    d_lines = []      # (lineno, body, kind, name, rhs, rhs_column)
    bidegrees: dict[str, tuple[int, int]] = {}
    bidegree_lines = []  # (lineno, name)
    for lineno, body in lines:
        header = _HEADER.match(body)
        if header:
            key, value = header.groups()
            if key == "flavor":
                if value not in FLAVORS:
                    raise ParseError(f"unknown flavor {value!r}", path, lineno,
                                     body.index(value) + 1)
                flavor = value
            else:
                connectivity = value
            continue
        if flavor is None:
            raise ParseError("the first line must be a flavor header",
                             path, lineno, 1)
        d_match = _D_LINE.match(body)
        if d_match:
            kind, name = d_match.groups()
            rhs = body[d_match.end():]
            d_lines.append((lineno, kind, name, rhs, d_match.end() + 1))
            continue
        bid_match = _BIDEGREE_LINE.match(body)
        if bid_match:
            name, internal, weight = bid_match.groups()
            if name in bidegrees:
                raise ParseError(f"duplicate bidegree for {name!r}", path,
                                 lineno, 1)
            bidegrees[name] = (int(internal), int(weight))
            bidegree_lines.append((lineno, name))
            continue
        gen_match = _GEN_LINE.match(body)
        if gen_match:
            name, degree = gen_match.groups()
            column = body.index(name) + 1
            if name in seen:
                raise ParseError(f"duplicate generator {name!r}", path,
                                 lineno, column)
            if _LAM.match(name):
                raise ParseError(f"{name!r} is reserved for lambda words",
                                 path, lineno, column)
            seen[name] = lineno
            gens.append(Generator(name, int(degree)))
            continue
        raise ParseError("unrecognized line", path, lineno,
                         len(body) - len(body.lstrip()) + 1)

    for lineno, name in bidegree_lines:
        if name not in seen:
            raise ParseError(f"bidegree for unknown generator {name!r}",
                             path, lineno, 1)
    algebra = free_algebra(flavor, gens)
    differential: dict = {}
    comultiplication: dict = {}
    for lineno, kind, name, rhs, column in d_lines:
        if name not in seen:
            raise ParseError(f"differential for unknown generator {name!r}",
                             path, lineno, 1)
        if kind == "dbar":
            if flavor != "DGC":
                raise ParseError("dbar lines only make sense for DGC",
                                 path, lineno, 1)
            if name in comultiplication:
                raise ParseError(f"duplicate dbar line for {name!r}",
                                 path, lineno, 1)
            comultiplication[name] = _parse_pairs(rhs, seen, path, lineno,
                                                  column)
            continue
        if name in differential:
            raise ParseError(f"duplicate differential for {name!r}",
                             path, lineno, 1)
        if flavor == "DGC":
            terms = _parse_linear(rhs, seen, path, lineno, column)
            if terms:
                differential[name] = terms
        else:
            value = parse_element(algebra, flavor, rhs, path=path,
                                  line=lineno, base_column=column)
            if not value.is_zero():
                differential[name] = value
    if flavor == "DGC":
        result = DgPresentation(flavor, gens, differential or None,
                                connectivity=connectivity,
                                comultiplication=comultiplication or None)
    else:
        result = DgPresentation(flavor, gens, differential or None,
                                connectivity=connectivity, algebra=algebra)
    if bidegrees:
        result.bidegrees = bidegrees
    return result


def _parse_linear(text: str, known, path: str, lineno: int, column: int
                  ) -> dict[str, Fraction]:
    """A linear combination of cogenerator names, as a coordinate dict."""
    tokens = _tokenize(text, path, lineno, column)
    out: dict[str, Fraction] = {}
    pos = 0
    sign = Fraction(1)
    first = True

    def fail(msg, at):
        raise ParseError(msg, path, lineno, at)

    while pos < len(tokens):
        kind, text_, col = tokens[pos]
        if text_ in "+-" and (not first or text_ == "-"):
            sign = Fraction(1) if text_ == "+" else Fraction(-1)
            pos += 1
            kind, text_, col = tokens[pos] if pos < len(tokens) else (None, "", col)
        coeff = sign
        if kind == "number":
            coeff *= Fraction(text_)
            pos += 1
            if text_ == "0" and pos == len(tokens) and not out:
                return {}
            if pos >= len(tokens) or tokens[pos][1] != "*":
                fail("expected '*' after coefficient", col)
            pos += 1
            kind, text_, col = tokens[pos] if pos < len(tokens) else (None, "", col)
        if kind != "name":
            fail("expected a cogenerator name", col)
        if text_ not in known:
            fail(f"unknown cogenerator {text_!r}", col)
        out[text_] = out.get(text_, Fraction(0)) + coeff
        pos += 1
        sign = Fraction(1)
        first = False
        if pos < len(tokens) and tokens[pos][1] not in "+-":
            fail("expected '+' or '-'", tokens[pos][2])
    if first:
        fail("missing element", column)
    return {n: c for n, c in out.items() if c}


def _parse_pairs(text: str, known, path: str, lineno: int, column: int
                 ) -> list[tuple[Fraction, str, str]]:
    """Reduced-comultiplication terms ``coeff*(left|right)``."""
    tokens = _tokenize(text, path, lineno, column)
    out: list[tuple[Fraction, str, str]] = []
    pos = 0
    first = True

    def fail(msg, at):
        raise ParseError(msg, path, lineno, at)

    def take(value=None, kind=None):
        nonlocal pos
        if pos >= len(tokens):
            fail("unexpected end of expression",
                 tokens[-1][2] if tokens else column)
        k, t, c = tokens[pos]
        if value is not None and t != value:
            fail(f"expected {value!r}, found {t!r}", c)
        if kind is not None and k != kind:
            fail(f"expected {kind}, found {t!r}", c)
        pos += 1
        return t, c

    while pos < len(tokens):
        sign = Fraction(1)
        if tokens[pos][1] in "+-" and (not first or tokens[pos][1] == "-"):
            sign = Fraction(-1) if tokens[pos][1] == "-" else Fraction(1)
            pos += 1
        coeff = sign
        if pos < len(tokens) and tokens[pos][0] == "number":
            coeff *= Fraction(tokens[pos][1])
            pos += 1
            take(value="*")
        take(value="(")
        left, lcol = take(kind="name")
        if left not in known:
            fail(f"unknown cogenerator {left!r}", lcol)
        take(value="|")
        right, rcol = take(kind="name")
        if right not in known:
            fail(f"unknown cogenerator {right!r}", rcol)
        take(value=")")
        out.append((coeff, left, right))
        first = False
    if first:
        fail("missing pairs", column)
    return out


def _parse_lattice(lines, path: str) -> Lattice:
    objects: list[str] = []
    arrows: list[tuple[str, str, str]] = []
    compose: dict[tuple[str, str], str] = {}
    for lineno, body in lines:
        stripped = body.strip()
        if stripped.startswith("objects"):
            rest = stripped[len("objects"):].lstrip()
            if not rest.startswith(":"):
                raise ParseError("expected 'objects:'", path, lineno, 1)
            if objects:
                raise ParseError("duplicate objects line", path, lineno, 1)
            objects = rest[1:].split()
            if not objects:
                raise ParseError("empty object list", path, lineno, 1)
            continue
        arrow = _ARROW_LINE.match(body)
        if arrow:
            arrows.append(arrow.groups())
            continue
        comp = _COMPOSE_LINE.match(body)
        if comp:
            f, g, h = comp.groups()
            if (f, g) in compose:
                raise ParseError(f"duplicate composition {f}.{g}", path,
                                 lineno, 1)
            compose[(f, g)] = h
            continue
        raise ParseError("unrecognized line", path, lineno,
                         len(body) - len(body.lstrip()) + 1)
    if not objects:
        raise ParseError("missing objects line", path, lines[0][0], 1)
    return Lattice(objects, objects[0], objects[-1], arrows, compose)


# ------------------------------------------------------------- serialization

def serialize_element(element) -> str:
    return element.display()


def _coeff_prefix(coeff: Fraction) -> str:
    if coeff == 1:
        return ""
    if coeff == -1:
        return "-"
    return f"{coeff}*"


def _serialize_linear(terms: dict, order: dict[str, int]) -> str:
    items = sorted(terms.items(), key=lambda kv: order[kv[0]])
    parts = []
    for i, (name, coeff) in enumerate(items):
        magnitude = _coeff_prefix(abs(coeff)) + name
        if i == 0:
            parts.append(("-" if coeff < 0 else "") + magnitude)
        else:
            parts.append(("- " if coeff < 0 else "+ ") + magnitude)
    return " ".join(parts) if parts else "0"


def _serialize_pairs(pairs) -> str:
    parts = []
    for i, (coeff, left, right) in enumerate(pairs):
        magnitude = f"{_coeff_prefix(abs(coeff))}({left}|{right})"
        if i == 0:
            parts.append(("-" if coeff < 0 else "") + magnitude)
        else:
            parts.append(("- " if coeff < 0 else "+ ") + magnitude)
    return " ".join(parts)


def serialize_presentation(obj: Union[DgPresentation, Lattice]) -> str:
    if isinstance(obj, Lattice):
        return _serialize_lattice(obj)
    p = obj
    lines = [f"flavor: {p.flavor}", f"connectivity: {p.connectivity}"]
    for g in p.generators:
        lines.append(f"{g.name} : {g.degree}")
    order = {g.name: i for i, g in enumerate(p.generators)}
    if p.flavor == "DGC":
        for g in p.generators:
            terms = p.differential.get(g.name) if p.differential else None
            if terms:
                lines.append(f"d {g.name} = {_serialize_linear(terms, order)}")
        for g in p.generators:
            pairs = (p.comultiplication or {}).get(g.name)
            if pairs:
                lines.append(f"dbar {g.name} = {_serialize_pairs(pairs)}")
    else:
        for g in p.generators:
            value = p.d_of_gen(g.name)
            if not value.is_zero():
                lines.append(f"d {g.name} = {value.display()}")
    bidegrees = getattr(p, "bidegrees", None)
    if bidegrees:
        for g in p.generators:
            if g.name in bidegrees:
                internal, weight = bidegrees[g.name]
                lines.append(f"bidegree {g.name} = ({internal}, {weight})")
    return "\n".join(lines) + "\n"


def _serialize_lattice(g: Lattice) -> str:
    objects = list(g.objects)
    if objects[0] != g.init or objects[-1] != g.fin:
        ordered = [g.init]
        ordered += [v for v in objects if v not in (g.init, g.fin)]
        ordered.append(g.fin)
        objects = ordered
    lines = ["objects: " + " ".join(objects)]
    for arrow in g.arrows.values():
        lines.append(f"{arrow.name} : {arrow.source} -> {arrow.target}")
    for (f, h2), h in sorted(g.compose_table.items()):
        lines.append(f"{f}.{h2} = {h}")
    return "\n".join(lines) + "\n"
