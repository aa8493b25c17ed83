"""Round-trip and error-position tests for the text formats."""

import random
from pathlib import Path

import pytest

from ratmodels import io
from ratmodels.dg import DgPresentation
from ratmodels.lie import FreeGradedLie, Generator
from ratmodels.quillen import ce
from ratmodels.wcat import Lattice, LatticeError

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def canonical(text: str) -> str:
    return io.serialize_presentation(io.parse_presentation_text(text))


# -------------------------------------------------------------- round trips

@pytest.mark.parametrize("name", ["B.dgl", "Bprime.dgl", "G.dgn", "B4.dgl",
                                  "s2.dgc", "cp2.dgc", "s3s4.dgc"])
def test_generated_fixtures_are_in_canonical_form(name):
    text = (FIXTURES / name).read_text()
    assert canonical(text) == text


@pytest.mark.parametrize("name", ["s2.dgl", "s3.dgl", "wedge22.dgl",
                                  "disk.dgl", "cp2.dgl", "hopflike.dgl",
                                  "threegen.dgl", "square.dga",
                                  "chain1.lat", "chain2.lat", "chain3.lat"])
def test_every_fixture_round_trips_byte_identically(name):
    once = io.serialize_presentation(io.parse_presentation(FIXTURES / name))
    assert canonical(once) == once


def test_lattice_round_trip_keeps_arrows_and_compositions():
    obj = io.parse_presentation(FIXTURES / "chain2.lat")
    assert isinstance(obj, Lattice)
    assert obj.init == "u" and obj.fin == "w"
    assert set(obj.arrows) == {"f", "g", "h"}
    assert obj.compose_table[("f", "g")] == "h"


def test_randomized_presentations_round_trip():
    rng = random.Random(7)
    degrees = [1, 1, 2, 3]
    for trial in range(25):
        gens = [Generator(f"g{i}", rng.choice(degrees)) for i in range(3)]
        L = FreeGradedLie(gens)
        differential = {}
        for g in gens:
            words = [w for w in L.basis(g.degree - 1)]
            if words and rng.random() < 0.7:
                value = L.zero()
                for w in rng.sample(words, min(2, len(words))):
                    value = value + rng.choice([-2, -1, 1, 3]) * L.word_as_element(w)
                if not value.is_zero():
                    differential[g.name] = value
        p = DgPresentation("DGL", gens, differential or None, algebra=L)
        text = io.serialize_presentation(p)
        assert canonical(text) == text


def test_dgc_round_trip_through_the_cochain_functor():
    l = io.parse_presentation(FIXTURES / "cp2.dgl")
    text = io.serialize_presentation(ce(l, 7).as_dgc())
    assert canonical(text) == text


def test_bidegree_lines_round_trip():
    text = ("flavor: DGL\nconnectivity: connected\na : 1\nx3 : 3\n"
            "d x3 = [a,a]\nbidegree a = (1, 0)\nbidegree x3 = (3, 1)\n")
    p = io.parse_presentation_text(text)
    assert p.bidegrees == {"a": (1, 0), "x3": (3, 1)}
    assert io.serialize_presentation(p) == text


# ----------------------------------------------------------------- elements

def test_element_syntax_accepts_fractions_and_nesting():
    p = io.parse_presentation_text(
        "flavor: DGL\na : 1\nb : 1\nc : 2\n")
    e = io.parse_element(p.algebra, "DGL", "1/2*[a,[b,c]] - [[a,c],b]")
    assert e.degree() == 4
    assert io.parse_element(p.algebra, "DGL", "0").is_zero()


def test_element_syntax_rejects_products_outside_the_algebra_flavor():
    p = io.parse_presentation_text("flavor: DGL\na : 1\n")
    with pytest.raises(io.ParseError, match="brackets"):
        io.parse_element(p.algebra, "DGL", "a*a")


def test_lambda_words_parse_only_for_the_lambda_flavor():
    g = io.parse_presentation(FIXTURES / "G.dgn")
    e = io.parse_element(g.algebra, "DGN", "lam3(a,a,x) - [x,x]")
    assert e.degree() == 6
    with pytest.raises(io.ParseError, match="takes 3 arguments"):
        io.parse_element(g.algebra, "DGN", "lam3(a,a)")
    l = io.parse_presentation(FIXTURES / "s2.dgl")
    with pytest.raises(io.ParseError, match="DGN"):
        io.parse_element(l.algebra, "DGL", "lam3(x,x,x)")


# ------------------------------------------------------------------- errors

def err(text: str) -> io.ParseError:
    with pytest.raises(io.ParseError) as info:
        io.parse_presentation_text(text, "f.dgl")
    return info.value


def test_error_positions_are_line_and_column_exact():
    e = err("flavor: DGL\na : 1\nd a = [a,q]\n")
    assert (e.path, e.line, e.column) == ("f.dgl", 3, 10)
    assert str(e) == "f.dgl:3:10: unknown generator 'q'"


def test_unknown_flavor_is_rejected():
    e = err("flavor: DGX\n")
    assert e.line == 1 and "DGX" in e.bare_message


def test_missing_flavor_header():
    assert "flavor header" in err("a : 1\n").bare_message


def test_duplicate_generator():
    e = err("flavor: DGL\na : 1\na : 2\n")
    assert e.line == 3 and "duplicate" in e.bare_message


def test_reserved_lambda_names():
    assert "reserved" in err("flavor: DGN\nlam3 : 2\n").bare_message


def test_differential_for_unknown_generator():
    assert "unknown generator" in err("flavor: DGL\na : 1\nd q = a\n").bare_message


def test_duplicate_differential():
    text = "flavor: DGL\na : 1\nx : 2\nd x = a\nd x = a\n"
    assert "duplicate differential" in err(text).bare_message


def test_unbalanced_brackets_report_the_open_position():
    e = err("flavor: DGL\na : 1\nx : 3\nd x = [a,[a,a]\n")
    assert e.line == 4


def test_trailing_tokens_are_rejected():
    assert "trailing" in err("flavor: DGL\na : 1\nx : 3\nd x = [a,a] a\n").bare_message


def test_unrecognized_line():
    assert "unrecognized" in err("flavor: DGL\na ! 1\n").bare_message


def test_empty_input_is_an_error_but_empty_generator_list_is_not():
    assert "empty" in err("   \n# only a comment\n").bare_message
    p = io.parse_presentation_text("flavor: DGL\n")
    assert p.generators == ()


def test_lattice_semantic_problems_surface_as_lattice_errors():
    text = "objects: u v\nf : u -> v\ng : u -> v\nf.g = f\n"
    with pytest.raises(LatticeError):
        io.parse_presentation_text(text)


def test_lattice_duplicate_composition():
    text = ("objects: u v w\nf : u -> v\ng : v -> w\nh : u -> w\n"
            "f.g = h\nf.g = h\n")
    with pytest.raises(io.ParseError, match="duplicate composition"):
        io.parse_presentation_text(text)


def test_parse_error_carries_the_file_path(tmp_path):
    bad = tmp_path / "bad.dgl"
    bad.write_text("flavor: DGL\na : 1\nd a = ]\n")
    with pytest.raises(io.ParseError) as info:
        io.parse_presentation(bad)
    assert info.value.path == str(bad)
