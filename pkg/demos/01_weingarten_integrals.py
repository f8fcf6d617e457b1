"""
Haar integrals over S_N and S_N^+
=================================

Integrals of coordinate words come from an exact Gram matrix inversion.
Up to degree three the quantum and classical answers coincide; at degree
four they split.
"""
from fractions import Fraction

from qperm import partitions as P
from qperm import weingarten as W

# the noncrossing Gram matrix at k=3, N=4
G = W.gram(3, 4, "nc")
print("partitions:", [str(p) for p in G.partitions])
print(G.entries)

# its inverse, exactly
Wm = W.weingarten(3, 4, "nc")
print("common denominator:", Wm.denominator)

# degree 3: same answer as the permutation group
i, j = (1, 2, 3), (2, 3, 4)
print("S_4^+ :", W.integrate_snplus(i, j, 4))
print("S_4   :", W.integrate_sn_closed(i, j, 4))

# degree 4: the crossing pattern (1,2,1,2) sees the difference
i = j = (1, 2, 1, 2)
print("S_5^+ :", W.integrate_snplus(i, j, 5))
print("S_5   :", W.integrate_sn_closed(i, j, 5))

# moments of the character: sum of diagonal integrals gives Catalan numbers
n = 5
for k in range(1, 5):
    index, Z, d = W.kernel_integral_table(k, n, "nc")
    total = Fraction(0)
    for kap, a in index.items():
        blocks = P.num_blocks(kap)
        count = 1
        for r in range(blocks):
            count *= n - r
        total += count * Fraction(int(Z[a, a]), d)
    print(f"k={k}: moment {total}, Catalan {P.catalan_number(k)}")
