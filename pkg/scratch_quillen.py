import time
from fractions import Fraction

from ratmodels.dg import DgPresentation
from ratmodels.lie import AbelianLie, FreeGradedLie, Generator
from ratmodels.quillen import ce, cobar, unit_comparison

# --- tiny Lie presentations ---------------------------------------------
def abelian_u1():
    g = [Generator("u", 1)]
    return DgPresentation("DGL", g, algebra=AbelianLie(g))

def free_u1():
    g = [Generator("u", 1)]
    return DgPresentation("DGL", g)   # free on one odd gen: [u,u] != 0

def sphere3():
    return DgPresentation("DGL", [Generator("u", 2)])

def two_cell():
    g = [Generator("a", 1), Generator("x", 3)]
    L = FreeGradedLie(g)
    a = L.gen("a")
    return DgPresentation("DGL", g, {"x": L.bracket(a, a)})

def quadratic_model():
    gens = [Generator("a", 1), Generator("b", 1), Generator("c", 2),
            Generator("x", 3), Generator("y", 5), Generator("w", 6),
            Generator("z", 7)]
    L = FreeGradedLie(gens)
    a, b, c = L.gen("a"), L.gen("b"), L.gen("c")
    x, y, w = L.gen("x"), L.gen("y"), L.gen("w")
    br = L.bracket
    d = {"x": br(a, a), "y": 3 * br(x, a),
         "w": br(br(c, a), br(b, a)),
         "z": 4 * br(y, a) + 3 * br(x, x)}
    return DgPresentation("DGL", gens, d)

# --- convention battle ----------------------------------------------------
for conv in ("shifted", "internal"):
    t0 = time.time()
    C = ce(quadratic_model(), 8, convention=conv)
    rep = C.validate(8)
    print(f"convention={conv}: ok={rep.ok}", rep.issues[:1], f"{time.time()-t0:.1f}s")

# also on the two-cell example (nonzero d, smaller)
for conv in ("shifted", "internal"):
    C = ce(two_cell(), 8, convention=conv)
    rep = C.validate(8)
    print(f"two_cell convention={conv}: ok={rep.ok}", rep.issues[:1])

# --- abelian example: dims 1 in degrees 0,2,4,... -------------------------
C = ce(abelian_u1(), 9)
print("abelian CE validate:", C.validate(9).ok)
print("abelian CE H dims 0..8:", C.homology_dims(8))

# --- free on u1: H(C(L)) = 1,0,1,0,0 (S^2) --------------------------------
C = ce(free_u1(), 7)
print("free u1 CE validate:", C.validate(7).ok)
print("free u1 CE H dims 0..4:", C.homology_dims(4))
print("  letter count:", len(C.letter_words))

# word-length filtration check on a sample monomial
Q = ce(quadratic_model(), 6)
sample = [m for m in Q.basis(6) if len(m) == 3][:3]
for m in sample:
    dp, ds = Q.d_prime(m), Q.d_second(m)
    print("lengths d' :", Q.lengths_of(dp), " d'':", Q.lengths_of(ds))

# --- cobar of a hand coalgebra -------------------------------------------
# sphere S^2 as coalgebra: single cogenerator e2, no diagonal
c_s2 = DgPresentation("DGC", [Generator("e2", 2)])
L_s2 = cobar(c_s2, 6)
print("cobar(S2) gens:", [(g.name, g.degree) for g in L_s2.generators])
print("cobar(S2) validate:", L_s2.validate(6).ok)
print("cobar(S2) H dims 1..3:", L_s2.homology(3).dims())

# CP^2-ish: e2, e4 with reduced diagonal e4 -> e2 (x) e2
c_cp2 = DgPresentation("DGC", [Generator("e2", 2), Generator("e4", 4)],
                       comultiplication={"e4": [(Fraction(1), "e2", "e2")]})
L_cp2 = cobar(c_cp2, 8)
print("cobar(CP2) d:", {k: v.display() for k, v in L_cp2.differential.items()})
print("cobar(CP2) validate:", L_cp2.validate(8).ok)
print("cobar(CP2) H dims 1..6:", L_cp2.homology(6).dims())

# --- unit comparison -------------------------------------------------------
for name, L, cap in [("abelian u1", abelian_u1(), 3),
                     ("sphere3", sphere3(), 4),
                     ("two_cell", two_cell(), 4)]:
    t0 = time.time()
    rep = unit_comparison(L, cap)
    print(f"unit {name}: equal={rep.equal}", rep.by_degree, f"{time.time()-t0:.1f}s")
