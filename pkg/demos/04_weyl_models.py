"""
Weyl matrix models
==================

P_gh is the projection onto U_g x U_h^* inside M_n.  With x = 1 the model
is classical (its Hopf image is Z_n x Z_n); averaging x over the Clifford
group makes it doubly flat.
"""
from qperm import generators as Gn
from qperm import models as M

for n in (2, 3):
    plain = Gn.weyl_model(n, twirl=None)
    twirled = Gn.weyl_model(n)
    print(f"n={n}: N={twirled.n}, fibers={twirled.num_fibers}")
    print("  single fiber doubly flat:", M.check_double_flat(plain).passed,
          " fixed_dim(2) =", M.fixed_dim(plain, 2).dim)
    r = M.check_double_flat(twirled)
    print("  Clifford fibers doubly flat:", r.passed, f"(deviation {r.max_deviation:.1e})",
          " fixed_dim(2) =", M.fixed_dim(twirled, 2).dim)

# triple transitivity is reported, not asserted
m = Gn.weyl_model(2)
print("n=2 triple flat:", M.check_triple_flat(m).passed, " fixed_dim(3) =", M.fixed_dim(m, 3).dim)
