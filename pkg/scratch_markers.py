"""Scratch: machine-verify the tower identities before freezing them."""
import time

from ratmodels.dg import DgPresentation, DgMorphism
from ratmodels.lie import Generator, FreeGradedLie
from ratmodels.nonassoc import NaAlgebra
from ratmodels.markers import SimplicialTower, stover_level

T0 = time.time()
PASS = 0
FAIL = 0

def check(name, cond):
    global PASS, FAIL
    if cond:
        PASS += 1
        print(f"  ok {name}")
    else:
        FAIL += 1
        print(f"  FAIL {name}")

def show(name, elt):
    print(f"  {name} = {elt.display() if hasattr(elt, 'display') else elt}")

MODEL_GENS = [
    Generator("a", 1), Generator("b", 1), Generator("c", 2),
    Generator("x", 3), Generator("y", 5), Generator("w", 6), Generator("z", 7),
]

def quadratic_model():
    alg = FreeGradedLie(MODEL_GENS)
    a, b, c, x, y, w, z = (alg.gen(n) for n in "abcxywz")
    return DgPresentation("DGL", MODEL_GENS, {
        "x": a.bracket(a),
        "y": 3 * x.bracket(a),
        "w": c.bracket(a).bracket(b.bracket(a)),
        "z": 4 * y.bracket(a) + 3 * x.bracket(x),
    }, algebra=alg)

def perturbed_model():
    alg = FreeGradedLie(MODEL_GENS)
    a, b, c, x, y, w, z = (alg.gen(n) for n in "abcxywz")
    return DgPresentation("DGL", MODEL_GENS, {
        "x": a.bracket(a),
        "y": 3 * x.bracket(a) - b.bracket(a).bracket(c),
        "w": c.bracket(a).bracket(b.bracket(a)),
        "z": 4 * y.bracket(a) + 3 * x.bracket(x) - 4 * alg.gen("w")
             - 2 * x.bracket(b).bracket(c),
    }, algebra=alg)

DGN_GENS = [Generator("a", 1), Generator("x", 3), Generator("y", 5), Generator("z", 7)]

def dgn_bottom():
    alg = NaAlgebra(DGN_GENS)
    a, x, y, z = (alg.gen(n) for n in "axyz")
    return DgPresentation("DGN", DGN_GENS, {
        "x": a.bracket(a),
        "y": 3 * x.bracket(a) - alg.lam(3, [a, a, a]),
        "z": 4 * y.bracket(a) + 3 * x.bracket(x) - 6 * alg.lam(3, [x, a, a])
             + alg.lam(4, [a, a, a, a]),
    }, algebra=alg)

# ---------------------------------------------------------------- B tower
print("== B tower, caps (7,6,5,4) ==")
B = quadratic_model()
tB = SimplicialTower(B, (7, 6, 5, 4))
t = time.time()
for n in range(4):
    lvl = tB.level(n)
    print(f"  level {n}: {len(lvl.gen_names)} generators "
          f"({time.time() - t:.2f}s cum)")
for n in range(4):
    rep = tB.level(n).validate(tB.caps[n])
    check(f"level {n} validates", rep.ok)

lvl0, lvl1, lvl2, lvl3 = (tB.level(n) for n in range(4))
a0, b0, c0 = (lvl0.algebra.gen(f"<{n}>") for n in "abc")
x0g, y0g, w0g = (lvl0.algebra.gen(f"<{n}>") for n in "xyw")
g = tB.wrap(0, B.algebra.gen("a").bracket(B.algebra.gen("a")))
k = tB.wrap(0, B.algebra.gen("x").bracket(B.algebra.gen("a")))

def wrapn(tower, n, elt):
    return tower.wrap(n, elt)

# x^(0) = <[<a>,<a>]>, level 1, degree 2
X0 = wrapn(tB, 1, a0.bracket(a0))
A = wrapn(tB, 1, a0)
check("x^(0) closed", lvl1.d_element(X0).is_zero())
check("d0 x^(0) = [<a>,<a>]", tB.face(1, 0).apply(X0) == a0.bracket(a0))
check("d1 x^(0) = <[a,a]>", tB.face(1, 1).apply(X0) == g)

# w^(0) = <[[<c>,<a>],[<b>,<a>]]>, level 1, degree 5
W0 = wrapn(tB, 1, c0.bracket(a0).bracket(b0.bracket(a0)))
check("w^(0) closed", lvl1.d_element(W0).is_zero())
check("d1 w^(0) = <[[c,a],[b,a]]>",
      tB.face(1, 1).apply(W0) == tB.wrap(0, B.algebra.gen("c").bracket(B.algebra.gen("a")).bracket(B.algebra.gen("b").bracket(B.algebra.gen("a")))))

# y^(0) = 3<[x^(0), A]>, level 2, degree 3
Y0 = 3 * wrapn(tB, 2, X0.bracket(A))
check("y^(0) closed", lvl2.d_element(Y0).is_zero())
check("d0 y^(0) = 3[x^(0),A]", tB.face(2, 0).apply(Y0) == 3 * X0.bracket(A))
check("d1 y^(0) = 0", tB.face(2, 1).apply(Y0).is_zero())
d2Y0 = tB.face(2, 2).apply(Y0)
g1 = wrapn(tB, 1, g.bracket(a0))
check("d2 y^(0) = 3<[<[a,a]>,<a>]>", d2Y0 == 3 * g1)

# y^(1) = 3<[<x>,<a>]>, level 1, degree 4
Y1 = 3 * wrapn(tB, 1, x0g.bracket(a0))
check("del y^(1) = d2 y^(0)", lvl1.d_element(Y1) == d2Y0)
check("d1 y^(1) = <3[x,a]> = <del_B y>",
      tB.face(1, 1).apply(Y1) == tB.wrap(0, B.d_of_gen("y")))

# z^(0) = <12[v,u] + 6[R,S]>, level 3, degree 4
v = wrapn(tB, 2, X0.bracket(A))
u = wrapn(tB, 2, A)
R = wrapn(tB, 2, A.bracket(A))
S = wrapn(tB, 2, X0)
Z0 = wrapn(tB, 3, 12 * v.bracket(u) + 6 * R.bracket(S))
check("z^(0) closed", lvl3.d_element(Z0).is_zero())
check("d1 z^(0) = 0 (Lie)", tB.face(3, 1).apply(Z0).is_zero())
check("d2 z^(0) = 0 (Lie)", tB.face(3, 2).apply(Z0).is_zero())
d3Z0 = tB.face(3, 3).apply(Z0)
g2 = wrapn(tB, 1, g)
h1 = wrapn(tB, 1, x0g.bracket(a0))
h2 = wrapn(tB, 1, x0g)
check("d3 z^(0) = 12<[g1,A]> + 6<[x^(0),g2]>",
      d3Z0 == 12 * wrapn(tB, 2, g1.bracket(A)) + 6 * wrapn(tB, 2, X0.bracket(g2)))

# z^(1) = 12<[h1,A]> + 6<[x^(0),h2]>, level 2, degree 5
Z1 = wrapn(tB, 2, 12 * h1.bracket(A) + 6 * X0.bracket(h2))
check("del z^(1) = d3 z^(0)", lvl2.d_element(Z1) == d3Z0)
check("d1 z^(1) = 0 (Lie)", tB.face(2, 1).apply(Z1).is_zero())
d2Z1 = tB.face(2, 2).apply(Z1)
check("d2 z^(1) = 12<[k,a0]> + 6<[g,x0]>",
      d2Z1 == wrapn(tB, 1, 12 * k.bracket(a0) + 6 * g.bracket(x0g)))

# z^(2) = <4[<y>,<a>] + 3[<x>,<x>]>, level 1, degree 6
Z2 = wrapn(tB, 1, 4 * y0g.bracket(a0) + 3 * x0g.bracket(x0g))
check("del z^(2) = d2 z^(1)", lvl1.d_element(Z2) == d2Z1)
check("d1 z^(2) = <4[y,a] + 3[x,x]> = <del_B z>",
      tB.face(1, 1).apply(Z2) == tB.wrap(0, B.d_of_gen("z")))

# level-0 disk boundaries <del_B gen>
for gen in "xywz":
    bd = tB.wrap(0, B.d_of_gen(gen))
    check(f"disk boundary <del_B {gen}> is a cycle", lvl0.d_element(bd).is_zero())

# simplicial identities
for n in range(1, 4):
    probs = tB.simplicial_identity_failures(n)
    check(f"simplicial identities at level {n} ({len(probs)} problems)", not probs)

print(f"[t={time.time()-T0:.1f}s]")

# ---------------------------------------------------------------- B' tower
print("== B' tower, caps (7,6,5,4) ==")
Bp = perturbed_model()
tP = SimplicialTower(Bp, (7, 6, 5, 4))
p0, p1, p2, p3 = (tP.level(n) for n in range(4))
for n in range(4):
    rep = tP.level(n).validate(tP.caps[n])
    check(f"level {n} validates", rep.ok)

pa0, pb0, pc0 = (p0.algebra.gen(f"<{n}>") for n in "abc")
px0, py0, pw0 = (p0.algebra.gen(f"<{n}>") for n in "xyw")
pg = tP.wrap(0, Bp.algebra.gen("a").bracket(Bp.algebra.gen("a")))
pX0 = tP.wrap(1, pa0.bracket(pa0))
pA = tP.wrap(1, pa0)
pB = tP.wrap(1, pb0)
pC = tP.wrap(1, pc0)
ph1 = tP.wrap(1, px0.bracket(pa0))
ph2 = tP.wrap(1, px0)
pW0 = tP.wrap(1, pc0.bracket(pa0).bracket(pb0.bracket(pa0)))
pY0 = 3 * tP.wrap(2, pX0.bracket(pA))
pd2Y0 = tP.face(2, 2).apply(pY0)

# y^(1)' = <3[<x>,<a>] - [[<b>,<a>],<c>]>
Y1p = tP.wrap(1, 3 * px0.bracket(pa0) - pb0.bracket(pa0).bracket(pc0))
check("del y^(1)' = d2 y^(0)", p1.d_element(Y1p) == pd2Y0)
check("d1 y^(1)' = <del_B' y>",
      tP.face(1, 1).apply(Y1p) == tP.wrap(0, Bp.d_of_gen("y")))

# z^(0), z^(1)' with the closed correction -4[M,A]
pv = tP.wrap(2, pX0.bracket(pA))
pu = tP.wrap(2, pA)
pR = tP.wrap(2, pA.bracket(pA))
pS = tP.wrap(2, pX0)
pZ0 = tP.wrap(3, 12 * pv.bracket(pu) + 6 * pR.bracket(pS))
pd3Z0 = tP.face(3, 3).apply(pZ0)

mu = tP.wrap(0, Bp.algebra.gen("b").bracket(Bp.algebra.gen("a")).bracket(Bp.algebra.gen("c")))
M = tP.wrap(1, mu)
check("M is closed", p1.d_element(M).is_zero())
Z1p = tP.wrap(2, 12 * ph1.bracket(pA) + 6 * pX0.bracket(ph2)
              - 4 * pW0 - 2 * pX0.bracket(pB).bracket(pC) - 4 * M.bracket(pA))
check("del z^(1)' = d3 z^(0) (unchanged)", p2.d_element(Z1p) == pd3Z0)
# without the correction the pairing below fails:
Z1p_paper = tP.wrap(2, 12 * ph1.bracket(pA) + 6 * pX0.bracket(ph2)
                    - 4 * pW0 - 2 * pX0.bracket(pB).bracket(pC))
check("del z^(1)'(paper, no -4[M,A]) still = d3 z^(0)",
      p2.d_element(Z1p_paper) == pd3Z0)

# z^(2)' = <4[<y>,<a>] + 3[<x>,<x>] - 4<w> - 2[[<x>,<b>],<c>]>
Z2p = tP.wrap(1, 4 * py0.bracket(pa0) + 3 * px0.bracket(px0)
              - 4 * pw0 - 2 * px0.bracket(pb0).bracket(pc0))
d2Z1p = tP.face(2, 2).apply(Z1p)
d2Z1p_paper = tP.face(2, 2).apply(Z1p_paper)
check("del z^(2)' = d2 z^(1)' (with correction)", p1.d_element(Z2p) == d2Z1p)
check("del z^(2)' != d2 z^(1)'(paper)", p1.d_element(Z2p) != d2Z1p_paper)
show("missing term", p1.d_element(Z2p) - d2Z1p_paper)
check("d1 z^(2)' = <del_B' z>",
      tP.face(1, 1).apply(Z2p) == tP.wrap(0, Bp.d_of_gen("z")))
for n in range(1, 4):
    probs = tP.simplicial_identity_failures(n)
    check(f"simplicial identities at level {n}", not probs)

print(f"[t={time.time()-T0:.1f}s]")

# ---------------------------------------------------------------- G tower (DGN)
print("== G tower, caps (7,6,5,4) ==")
G = dgn_bottom()
tG = SimplicialTower(G, (7, 6, 5, 4))
q0, q1, q2, q3 = (tG.level(n) for n in range(4))
for n in range(4):
    rep = tG.level(n).validate(tG.caps[n])
    check(f"level {n} validates", rep.ok)

qa0 = q0.algebra.gen("<a>")
qx0 = q0.algebra.gen("<x>")
qy0 = q0.algebra.gen("<y>")
qX0 = tG.wrap(1, qa0.bracket(qa0))
qA = tG.wrap(1, qa0)
qh1 = tG.wrap(1, qx0.bracket(qa0))
qh2 = tG.wrap(1, qx0)
qY0 = 3 * tG.wrap(2, qX0.bracket(qA))
Wg = tG.wrap(1, qa0.bracket(qa0).bracket(qa0))
check("W = <[[a0,a0],a0]> nonzero in DGN", not Wg.is_zero())
d1Y0 = tG.face(2, 1).apply(qY0)
check("d1 y^(0) = 3W (DGN)", d1Y0 == 3 * Wg)
d2Y0g = tG.face(2, 2).apply(qY0)

# y^(1;1) = <lam3(a0,a0,a0)>, y^(1;2) = 3<[x0,a0]>
Lam = tG.wrap(1, q0.algebra.lam(3, [qa0, qa0, qa0]))
check("del y^(1;1) = d1 y^(0)", q1.d_element(Lam) == d1Y0)
Y12 = 3 * qh1
check("del y^(1;2) = d2 y^(0)", q1.d_element(Y12) == d2Y0g)
cyc = tG.face(1, 1).apply(Y12) - tG.face(1, 1).apply(Lam)
check("d1 y^(1;2) - d1 y^(1;1) = <del_G y>", cyc == tG.wrap(0, G.d_of_gen("y")))

# z^(0) and the three first-order disks
qv = tG.wrap(2, qX0.bracket(qA))
qu = tG.wrap(2, qA)
qR = tG.wrap(2, qA.bracket(qA))
qS = tG.wrap(2, qX0)
qZ0 = tG.wrap(3, 12 * qv.bracket(qu) + 6 * qR.bracket(qS))
check("z^(0) closed", q3.d_element(qZ0).is_zero())
d1Z0 = tG.face(3, 1).apply(qZ0)
d2Z0 = tG.face(3, 2).apply(qZ0)
d3Z0g = tG.face(3, 3).apply(qZ0)
check("d2 z^(0) = 12<[W,A]> (DGN)", d2Z0 == 12 * tG.wrap(2, Wg.bracket(qA)))

Z11 = 6 * tG.wrap(2, q1.algebra.lam(3, [qX0, qA, qA]))
check("del z^(1;1) = d1 z^(0)", q2.d_element(Z11) == d1Z0)
Z12 = 4 * tG.wrap(2, Lam.bracket(qA))
check("del z^(1;2) = d2 z^(0)", q2.d_element(Z12) == d2Z0)
Z13 = tG.wrap(2, 12 * qh1.bracket(qA) + 6 * qX0.bracket(qh2))
check("del z^(1;3) = d3 z^(0)", q2.d_element(Z13) == d3Z0g)

# second-order pieces: cycle(i,j) = d_i z^(1;j) - d_{j-1} z^(1;i)
cyc12 = tG.face(2, 1).apply(Z12) - tG.face(2, 1).apply(Z11)
cyc13 = tG.face(2, 1).apply(Z13) - tG.face(2, 2).apply(Z11)
cyc23 = tG.face(2, 2).apply(Z13) - tG.face(2, 2).apply(Z12)
Z212 = tG.wrap(1, q0.algebra.lam(4, [qa0, qa0, qa0, qa0]))
Z213 = 6 * tG.wrap(1, q0.algebra.lam(3, [qx0, qa0, qa0]))
Z223 = tG.wrap(1, 4 * qy0.bracket(qa0) + 3 * qx0.bracket(qx0))
check("del z^(2;1,2) = d1 z^(1;2) - d1 z^(1;1)", q1.d_element(Z212) == cyc12)
check("del z^(2;1,3) = d1 z^(1;3) - d2 z^(1;1)", q1.d_element(Z213) == cyc13)
check("del z^(2;2,3) = d2 z^(1;3) - d2 z^(1;2)", q1.d_element(Z223) == cyc23)
show("cyc13", cyc13)
show("cyc23", cyc23)

# bottom faces of the second-order pieces
d1Z212 = tG.face(1, 1).apply(Z212)
d1Z213 = tG.face(1, 1).apply(Z213)
d1Z223 = tG.face(1, 1).apply(Z223)
ga = G.algebra.gen("a"); gx = G.algebra.gen("x"); gy = G.algebra.gen("y")
check("d1 z^(2;1,2) = <lam4(a,a,a,a)>",
      d1Z212 == tG.wrap(0, G.algebra.lam(4, [ga, ga, ga, ga])))
check("d1 z^(2;1,3) = 6<lam3(x,a,a)>",
      d1Z213 == 6 * tG.wrap(0, G.algebra.lam(3, [gx, ga, ga])))
check("d1 z^(2;2,3) = <4[y,a]+3[x,x]>",
      d1Z223 == tG.wrap(0, 4 * gy.bracket(ga) + 3 * gx.bracket(gx)))
# alternating combination = <del_G z>
comb = d1Z212 - d1Z213 + d1Z223
check("d1(z212) - d1(z213) + d1(z223) = <del_G z>", comb == tG.wrap(0, G.d_of_gen("z")))
for n in range(1, 4):
    probs = tG.simplicial_identity_failures(n)
    check(f"simplicial identities at level {n}", not probs)

print(f"[t={time.time()-T0:.1f}s]")

# ------------------------------------------------- lambda-to-Lie projection
print("== projection of the G tower onto the Lie tower over a,x,y,z ==")
from ratmodels.nonassoc import project_to_lie
B4_GENS = [Generator("a", 1), Generator("x", 3), Generator("y", 5), Generator("z", 7)]
b4alg = FreeGradedLie(B4_GENS)
b4a, b4x, b4y, b4z = (b4alg.gen(n) for n in "axyz")
B4 = DgPresentation("DGL", B4_GENS, {
    "x": b4a.bracket(b4a),
    "y": 3 * b4x.bracket(b4a),
    "z": 4 * b4y.bracket(b4a) + 3 * b4x.bracket(b4x),
}, algebra=b4alg)
tB4 = SimplicialTower(B4, (7, 6, 5, 4))

def project_level(n, elt):
    """G-tower level-n element -> Lie-tower level-n element."""
    if n < 0:
        return project_to_lie(elt, b4alg)
    target = tB4.level(n)
    out = target.algebra.zero()
    for word, coeff in elt.terms.items():
        out = out + coeff * _project_word(n, word)
    return out

def _project_word(n, word):
    tgt = tB4.level(n)
    tag = word[0]
    if tag == "g":
        parent_word = _gen_parent_word(n, word)
        parent_elt = tG.parent(n).algebra.word_as_element(parent_word)
        return tB4.wrap(n, project_level(n - 1, parent_elt))
    if tag == "p":
        return _project_word(n, word[1]).bracket(_project_word(n, word[2]))
    return tgt.algebra.zero()  # lambda words die

def _gen_parent_word(n, word):
    # word = ("g", idx): recover which parent word this generator wraps
    name = tG.level(n).algebra.generators[word[1]].name
    for pw, nm in tG._wrap_names[n].items():
        if nm == name:
            return pw
    raise KeyError(name)

ok = True
for n in range(2):
    src = tG.level(n)
    for name in src.gen_names:
        e = src.algebra.gen(name)
        lhs = project_level(n, src.d_element(e))
        rhs = tB4.level(n).d_element(project_level(n, e))
        if lhs != rhs:
            ok = False
            print(f"  proj does not chain-commute at {name}")
            break
check("projection commutes with del (levels 0-1)", ok)
check("proj z^(1;3) = Lie z^(1) shape", project_level(2, Z13)
      == tB4.wrap(2, 12 * tB4.wrap(1, tB4.level(0).algebra.gen("<x>").bracket(tB4.level(0).algebra.gen("<a>"))).bracket(tB4.wrap(1, tB4.level(0).algebra.gen("<a>")))
                 + 6 * tB4.wrap(1, tB4.level(0).algebra.gen("<a>").bracket(tB4.level(0).algebra.gen("<a>"))).bracket(tB4.wrap(1, tB4.level(0).algebra.gen("<x>")))))
check("proj z^(2;1,2) = 0", project_level(1, Z212).is_zero())
check("proj of del z^(2;2,3) identity holds in Lie tower",
      project_level(0, d1Z223) == tB4.wrap(0, 4 * b4y.bracket(b4a) + 3 * b4x.bracket(b4x)))

print(f"[t={time.time()-T0:.1f}s]")

# ------------------------------------------------- degeneracy battery, cap 4
print("== uniform cap-4 tower over B: degeneracies ==")
tU = SimplicialTower(B, (4, 4, 4, 4))
for n in range(3):
    probs = tU.simplicial_identity_failures(n, degeneracies=True)
    check(f"face/degeneracy identities at level {n}", not probs)
print(f"  level sizes: {[len(tU.level(n).gen_names) for n in range(4)]}")
print(f"[t={time.time()-T0:.1f}s]")

# ------------------------------------------------- homology of B (corpus)
print("== homology dims ==")
print("  H(B) cap 7:", B.homology(7).dims())
print("  H(B') cap 7:", Bp.homology(7).dims())
print(f"[t={time.time()-T0:.1f}s]")

# ------------------------------------------------- secondary operation
print("== secondary operation prototype ==")

def build_f0(tower, target, images):
    lvl0 = tower.level(0)
    values = {}
    for name in lvl0.gen_names:
        if name in images:
            values[name] = target.algebra.gen(images[name])
        else:
            values[name] = target.algebra.zero()
    f0 = DgMorphism(lvl0, target, values)
    return f0

class Homotopy:
    def __init__(self, tower, target, cap, images, seeds):
        self.tower = tower
        self.target = target
        self.cap = cap
        self.level1 = tower.level(1)
        self.f0 = build_f0(tower, target, images)
        probs = self.f0.check()
        if probs:
            raise ValueError(f"f0 not a chain map: {probs[:3]}")
        lvl1 = self.level1
        vals0, vals1 = {}, {}
        for name in lvl1.gen_names:
            gen = lvl1.algebra.gen(name)
            vals0[name] = self.f0.apply(tower.face(1, 0).apply(gen))
            vals1[name] = self.f0.apply(tower.face(1, 1).apply(gen))
        self.e0 = DgMorphism(lvl1, target, vals0)
        self.e1 = DgMorphism(lvl1, target, vals1)
        # needed closure: letters of the seed elements, letters of their
        # differentials, and every generator whose differential meets the set
        def letters_of(elt):
            out = set()
            for word in elt.terms:
                for i in self._word_letters(word):
                    out.add(lvl1.algebra.generators[i].name)
            return out
        needed = set()
        for s in seeds:
            needed |= letters_of(s)
        changed = True
        d_letters = {n: letters_of(lvl1.d_of_gen(n)) for n in lvl1.gen_names
                     if lvl1.degree_of(n) <= cap}
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
        self.names = sorted(needed, key=lvl1.degree_of)
        self.d_letters = d_letters
        self.values = {}
        self.touched = set()
        for name in self.names:
            value = self._solve(name, self.values)
            if value is None:
                raise ValueError(f"no homotopy value for {name}")
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
            # tower differentials are linear in the wrap generators
            letter = self.level1.algebra.generators[word[1] if word[0] == "g" else word[0]].name
            out = out - coeff * values[letter]
        return out

    def _solve(self, name, values):
        rhs = self._rhs(name, values)
        deg = self.level1.degree_of(name) + 1
        if rhs.is_zero():
            return self.target.zero()
        mat = self.target.d_matrix(deg)
        vec = self.target.vector_of(rhs, deg - 1)
        sol = mat.solve(vec)
        if sol is None:
            return None
        return self.target.element_from_vector(deg, sol)

    def evaluate(self, elt, values=None):
        values = values if values is not None else self.values
        out = self.target.zero()
        for word, coeff in elt.terms.items():
            out = out + coeff * self._eval_word(word, values)
        return out

    def _eval_word(self, word, values):
        alg = self.level1.algebra
        if alg.is_basis_word(word) and len(self._letters(word)) == 1:
            name = alg.generators[word[0]].name
            self.touched.add(name)
            return values[name]
        left, right = alg.split_word(word)
        left_e = alg.word_as_element(left)
        right_e = alg.word_as_element(right)
        hl = self.evaluate(left_e, values)
        hr = self.evaluate(right_e, values)
        sign = -1 if alg.word_degree(left) % 2 else 1
        return hl.bracket(self.e1.apply(right_e)) + sign * self.e0.apply(left_e).bracket(hr)

    def _letters(self, word):
        return word if isinstance(word, tuple) else (word,)

B_images = {"<a>": "a", "<b>": "b", "<c>": "c"}

def run_operation(tower, target, cell_level, cell, cap):
    faces = [tower.face(cell_level, i).apply(cell) for i in range(cell_level + 1)]
    H = Homotopy(tower, target, cap, B_images, faces)
    print("  needed generators:", H.names)
    H.touched = set()
    V = target.zero()
    for i, f in enumerate(faces):
        V = V + (-1) ** i * H.evaluate(f)
    base_class = target.homology_class_of(V, cap)
    print("  V0 =", V.display(), "->", base_class.status)
    # indeterminacy
    touched = set(H.touched)
    maxdeg = max(H.level1.degree_of(n) for n in touched) if touched else 0
    lvl1 = H.level1
    # reverse index: name -> parents whose differential hits it
    parents = {n: set() for n in H.names}
    for n in H.names:
        for m in H.d_letters.get(n, ()):
            parents[m].add(n)
    def ancestors(n):
        out, todo = set(), [n]
        while todo:
            m = todo.pop()
            for p in parents.get(m, ()):
                if p not in out:
                    out.add(p)
                    todo.append(p)
        return out
    directions = []
    tried = 0
    for gname in H.names:
        gdeg = lvl1.degree_of(gname)
        if gdeg > maxdeg:
            continue
        anc = ancestors(gname)
        mat = target.d_matrix(gdeg + 1)
        for kvec in mat.kernel_basis():
            tried += 1
            kappa = target.element_from_vector(gdeg + 1, kvec)
            shifted = dict(H.values)
            shifted[gname] = shifted[gname] + kappa
            okdir = True
            for other in H.names:
                if lvl1.degree_of(other) <= gdeg or other not in anc:
                    continue
                val = H._solve(other, shifted)
                if val is None:
                    okdir = False
                    break
                shifted[other] = val
            if not okdir:
                continue
            Vp = target.zero()
            for i, f in enumerate(faces):
                Vp = Vp + (-1) ** i * H.evaluate(f, shifted)
            delta = Vp - V
            cls = target.homology_class_of(delta, cap)
            if not cls.is_zero:
                directions.append((gname, kappa, cls))
    print(f"  tried {tried} directions, {len(directions)} with nonzero class")
    for gname, kappa, cls in directions:
        print(f"    shift {gname} by {kappa.display()}: class {cls.coefficients if hasattr(cls,'coefficients') else cls}")
    return V, base_class, directions

print("-- target B' --")
t = time.time()
V, cls, dirs = run_operation(tP, Bp, 2, pY0, 7)
check("V0 = 3[x,a] (B')", V == 3 * Bp.algebra.gen("x").bracket(Bp.algebra.gen("a")))
check("base class nonzero (B')", not cls.is_zero)
check("no nonzero directions (B')", not dirs)
print(f"  ({time.time()-t:.1f}s)")

print("-- target B --")
t = time.time()
V2, cls2, dirs2 = run_operation(tB, B, 2, Y0, 7)
check("base class zero (B)", cls2.is_zero)
print("  V0(B) =", V2.display())
print(f"  ({time.time()-t:.1f}s)")

print(f"[t={time.time()-T0:.1f}s]")

# ------------------------------------------------- acyclicity shadow sizing
print("== shadow sizing: uniform cap-5 over B ==")
t = time.time()
tS = SimplicialTower(B, (5, 5, 5, 5))
for n in range(4):
    lvl = tS.level(n)
    print(f"  level {n}: {len(lvl.gen_names)} gens, basis dims ",
          [len(lvl.basis(d)) for d in range(1, 6)], f"({time.time()-t:.1f}s cum)")

print(f"TOTAL {PASS} pass / {FAIL} fail  [t={time.time()-T0:.1f}s]")
