import random
import time

from ratmodels.wcat import (Lattice, basis_complex, chains, concatenate,
                            cone_check, random_lattice, w_complex)

single = Lattice(["s", "t"], "s", "t", [("phi", "s", "t")])
print("single chains k=1:", chains(single, "s", "t", 1))
W = w_complex(single, "s", "t")
print("single W cells:", W.cell_counts(), "euler:", W.euler_characteristic())
print("single basis cells:", basis_complex(single).cell_counts())
print("single cone:", cone_check(single).as_dict())

interval = Lattice(["s", "m", "t"], "s", "t",
                   [("f", "s", "m"), ("g", "m", "t"), ("phi", "s", "t")],
                   {("f", "g"): "phi"})
W = w_complex(interval, "s", "t")
print("interval W cells:", W.cell_counts())
print("interval basis:", basis_complex(interval).cell_counts())
rep = cone_check(interval)
print("interval cone:", rep.ok, rep.critical_cells, rep.homology)

square = Lattice(
    ["s", "m1", "m2", "t"], "s", "t",
    [("f1", "s", "m1"), ("f2", "m1", "m2"), ("f3", "m2", "t"),
     ("f12", "s", "m2"), ("f23", "m1", "t"), ("phi", "s", "t")],
    {("f1", "f2"): "f12", ("f2", "f3"): "f23",
     ("f1", "f23"): "phi", ("f12", "f3"): "phi"})
print("square 3-chains:", chains(square, "s", "t", 3))
W = w_complex(square, "s", "t")
print("square W cells:", W.cell_counts(), "euler:", W.euler_characteristic())
print("square d2=0:", W.boundary_squares_to_zero())
B = basis_complex(square)
print("square basis cells:", B.cell_counts(), "euler:", B.euler_characteristic())
print("square basis reduced H:", B.reduced_homology_dims())
rep = cone_check(square)
print("square cone:", rep.ok, rep.critical_cells)

# concatenation associativity on the square lattice's pieces
c1 = w_complex(square, "s", "m1").cells(0)[0]
c2 = w_complex(square, "m1", "m2").cells(0)[0]
c3 = w_complex(square, "m2", "t").cells(0)[0]
left = concatenate(square, concatenate(square, c1, c2), c3)
right = concatenate(square, c1, concatenate(square, c2, c3))
print("concat associative:", left == right, left.display())

rng = random.Random(20260815)
t0 = time.time()
bad = 0
for i in range(50):
    g = random_lattice(rng)
    rep = cone_check(g)
    if not rep.ok:
        bad += 1
        print("FAIL", i, len(g.objects), rep.detail)
print(f"50 random cone checks: {bad} failures, {time.time()-t0:.1f}s")
