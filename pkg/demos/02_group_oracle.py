"""
Permutation groups as a classical reference
===========================================

For a finite group the fixed-space dimensions of the tensor powers are
orbit counts.  The transfer-matrix route must reproduce them.
"""
from qperm import models as M
from qperm import permgroup as PG

for name in ["Z(4)", "D(4)", "A4", "S4", "A5"]:
    G = PG.named_group(name)
    m = PG.group_model(G)
    burnside = [PG.dim_fix(G, k) for k in (1, 2, 3)]
    cesaro = [M.fixed_dim(m, k).dim for k in (1, 2, 3)]
    trans = [PG.is_k_transitive(G, k) for k in (1, 2, 3)]
    print(f"{name:5s} order {G.order:3d}  Burnside {burnside}  Cesaro {cesaro}  k-transitive {trans}")

# orbitals of the square's symmetry group: diagonal, edges, diagonals
D4 = PG.group_model(PG.dihedral_group(4))
for c in M.orbital_structure(D4, 2).classes:
    print(c)
