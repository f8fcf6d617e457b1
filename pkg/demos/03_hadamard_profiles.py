"""
Hadamard models and their profile graphs
========================================

A Hadamard matrix gives a flat model of rank-one projections.  Its profile
graph is connected exactly when the model is doubly transitive.
"""
import numpy as np

from qperm import generators as Gn
from qperm import models as M

examples = {
    "Fourier 4": Gn.fourier_matrix(4),
    "Fourier 5": Gn.fourier_matrix(5),
    "F4(q), q=exp(0.7i)": Gn.f4_family(np.exp(0.7j)),
    "Tao 6": Gn.tao_matrix(),
    "Paley 12": Gn.paley_hadamard(11),
}

for name, H in examples.items():
    m = Gn.hadamard_model(H)
    g = Gn.profile_graph_of_model(m)
    dims = [M.fixed_dim(m, k).dim for k in (1, 2)]
    print(f"{name:20s} components {len(g.components):3d}  fixed dims {dims}")

# the Fourier matrix produces a model whose Hopf image is the cyclic group
print(Gn.profile_graph(Gn.fourier_matrix(4)).to_dot())
