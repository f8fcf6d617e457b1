"""
The minimal doubly flat model for S_3
=====================================

Six rank-one projections a..f onto an orthonormal basis fill a 3 x 3 magic
matrix with rank-two entries.  On every word up to length four its traces
equal the integrals over S_3.
"""
from qperm import generators as Gn
from qperm import models as M
from qperm import permgroup as PG

m = Gn.s3_minimal_model(seed=7)
print("magic:", M.verify_magic(m).passed)
f = M.flatness_profile(m)
print("entry rank:", f.common_rank, " trace:", f.traces[0, 0])
print("doubly flat:", M.check_double_flat(m).passed)

S3 = PG.symmetric_group(3)
rep = Gn.check_stationary(m, S3, max_k=4)
for k, dev in rep.deviations.items():
    print(f"  words of length {k}: max deviation from S_3 {dev:.1e}")

# a Fourier model on three points only agrees at length one
F3 = Gn.hadamard_model(Gn.fourier_matrix(3))
print(Gn.check_stationary(F3, S3, max_k=3).deviations)
