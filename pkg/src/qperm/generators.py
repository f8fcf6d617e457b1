"""Constructors for concrete magic models and the checks tied to them.

* complex Hadamard matrices and their rank-one models, with profile graphs
* Weyl-matrix models on ``n**2`` points, averaged over the Clifford group
* the minimal doubly flat model of ``C(S_3)`` and a stationarity checker
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.stats import unitary_group

from . import models as M
from .errors import ConstructionError, StructuralError
from .permgroup import PermutationGroup, haar_table

__all__ = [
    "ComplexHadamard",
    "HadamardReport",
    "fourier_matrix",
    "f4_family",
    "tao_matrix",
    "paley_hadamard",
    "dephase",
    "verify_hadamard",
    "hadamard_model",
    "ProfileGraph",
    "profile_graph",
    "profile_graph_of_model",
    "WeylSystem",
    "weyl_system",
    "clifford_unitaries",
    "weyl_model",
    "random_orthonormal_basis",
    "s3_minimal_model",
    "S3_PATTERN",
    "StationarityReport",
    "check_stationary",
    "hadamard_to_dict",
    "hadamard_from_dict",
    "load_hadamard",
]


# ---------------------------------------------------------------------------
# complex Hadamard matrices


@dataclass(frozen=True, eq=False)
class ComplexHadamard:
    entries: np.ndarray

    def __post_init__(self):
        H = np.array(self.entries, dtype=complex)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise StructuralError(f"Hadamard matrix must be square, got shape {H.shape}")
        H.setflags(write=False)
        object.__setattr__(self, "entries", H)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def fourier_matrix(n: int) -> ComplexHadamard:
    """``F[j, k] = exp(2 pi i jk / n)`` with 0-based exponents."""
    j = np.arange(n)
    return ComplexHadamard(np.exp(2j * np.pi * np.outer(j, j) / n))


def f4_family(q: complex) -> ComplexHadamard:
    """One-parameter deformation of ``F_2 (x) F_2``; ``q = +-1, +-i`` are degenerate."""
    q = complex(q)
    return ComplexHadamard(
        [[1, 1, 1, 1], [1, q, -1, -q], [1, -1, 1, -1], [1, -q, -1, q]]
    )


def tao_matrix() -> ComplexHadamard:
    """Tao's 6 x 6 Hadamard matrix over the cube roots of unity."""
    w = np.exp(2j * np.pi / 3)
    return ComplexHadamard(
        [
            [1, 1, 1, 1, 1, 1],
            [1, 1, w, w, w**2, w**2],
            [1, w, 1, w**2, w**2, w],
            [1, w, w**2, 1, w, w**2],
            [1, w**2, w**2, w, 1, w],
            [1, w**2, w, w**2, w, 1],
        ]
    )


def paley_hadamard(q: int = 11) -> ComplexHadamard:
    """Real Paley (type I) Hadamard matrix of order ``q + 1``, ``q = 3 mod 4`` prime."""
    if q % 4 != 3:
        raise ValueError("Paley type I construction needs q = 3 mod 4")
    squares = {(x * x) % q for x in range(1, q)}

    def chi(a):
        a %= q
        return 0 if a == 0 else (1 if a in squares else -1)

    S = np.zeros((q + 1, q + 1))
    S[0, 1:] = 1
    S[1:, 0] = -1
    S[1:, 1:] = [[chi(b - a) for b in range(q)] for a in range(q)]
    return ComplexHadamard(S + np.eye(q + 1))


def dephase(H: ComplexHadamard) -> ComplexHadamard:
    """Normalize the first row and column to 1."""
    A = H.entries
    A = A / A[0][None, :]
    A = A / A[:, 0][:, None]
    return ComplexHadamard(A)


@dataclass
class HadamardReport:
    passed: bool
    modulus_defect: float
    orthogonality_defect: float
    tol: float


def verify_hadamard(H: ComplexHadamard, tol: float = M.DEFAULT_TOL) -> HadamardReport:
    A = H.entries
    mod = float(np.abs(np.abs(A) - 1).max())
    orth = float(np.abs(A @ A.conj().T - H.n * np.eye(H.n)).max())
    return HadamardReport(mod <= tol and orth <= tol, mod, orth, tol)


def _rank_one(v):
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def hadamard_model(H: ComplexHadamard, tol: float = M.DEFAULT_TOL) -> M.MagicModel:
    """Single fiber, ``P_ij`` = projection onto the row ratio ``H_i / H_j``."""
    rep = verify_hadamard(H, tol)
    if not rep.passed:
        raise ConstructionError(f"not a complex Hadamard matrix: {rep}")
    A = H.entries
    N = H.n
    grid = np.empty((N, N, N, N), dtype=complex)
    for i in range(N):
        for j in range(N):
            grid[i, j] = _rank_one(A[i] / A[j])
    model = M.MagicModel(N, N, (Fraction(1),), grid[None])
    _require_magic(model, tol)
    return model


def _require_magic(model, tol):
    rep = M.verify_magic(model, tol)
    if not rep.passed:
        raise ConstructionError(f"constructed model is not magic: {rep}")


@dataclass
class ProfileGraph:
    vertices: list[tuple[int, int]]  # off-diagonal pairs (i, k), 1-based
    edges: list[tuple[tuple[int, int], tuple[int, int]]]
    components: list[list[tuple[int, int]]]
    connected: bool

    def to_dot(self):
        return M.graph_to_dot(self.vertices, self.edges, "profile")


def profile_graph_of_model(m: M.MagicModel, tol: float = M.ORBIT_THRESHOLD) -> ProfileGraph:
    """Graph on pairs ``(i, k)``, ``i != k``, joining ``(i,k)`` and ``(j,l)``
    when ``tr(P_ij P_kl) > tol`` with ``j != l``."""
    N = m.n
    T = M.trace_table2(m)  # axes i, j, k, l
    verts = [(i, k) for i in range(N) for k in range(N) if i != k]
    pos = {v: a for a, v in enumerate(verts)}
    R = np.zeros((len(verts), len(verts)), dtype=bool)
    for (i, k), (j, l) in product(verts, verts):
        if T[i, j, k, l] > tol:
            R[pos[(i, k)], pos[(j, l)]] = True
    R |= R.T
    ncomp, labels = connected_components(csr_matrix(R), directed=False)
    comps: dict[int, list] = {}
    for a, lab in enumerate(labels):
        comps.setdefault(int(lab), []).append((verts[a][0] + 1, verts[a][1] + 1))
    one = lambda v: (v[0] + 1, v[1] + 1)  # noqa: E731
    edges = [(one(verts[a]), one(verts[b])) for a, b in zip(*np.nonzero(np.triu(R, 1)))]
    return ProfileGraph(
        vertices=[one(v) for v in verts],
        edges=edges,
        components=sorted(comps.values()),
        connected=ncomp <= 1,
    )


def profile_graph(H: ComplexHadamard, tol: float = M.ORBIT_THRESHOLD) -> ProfileGraph:
    return profile_graph_of_model(hadamard_model(H), tol)


def hadamard_to_dict(H: ComplexHadamard) -> dict:
    A = H.entries
    return {"n": H.n, "entries": np.stack([A.real, A.imag], axis=-1).tolist()}


def hadamard_from_dict(d: dict, dephased: bool = False) -> ComplexHadamard:
    try:
        raw = np.asarray(d["entries"], dtype=float)
        n = int(d["n"])
    except (KeyError, TypeError, ValueError) as exc:
        raise StructuralError(f"malformed Hadamard document: {exc}") from exc
    if raw.shape != (n, n, 2):
        raise StructuralError(f"entries of shape {raw.shape}, expected {(n, n, 2)}")
    H = ComplexHadamard(raw[..., 0] + 1j * raw[..., 1])
    return dephase(H) if dephased else H


def load_hadamard(path, dephased: bool = False) -> ComplexHadamard:
    with open(path) as fh:
        return hadamard_from_dict(json.load(fh), dephased)


# ---------------------------------------------------------------------------
# Weyl matrices


@dataclass(frozen=True, eq=False)
class WeylSystem:
    n: int
    labels: tuple[tuple[int, int], ...]  # (a, b) in Z_n x Z_n
    matrices: np.ndarray  # (n*n, n, n), U_(a,b) = X^a Z^b


def weyl_system(n: int) -> WeylSystem:
    X = np.roll(np.eye(n), 1, axis=0)
    Z = np.diag(np.exp(2j * np.pi * np.arange(n) / n))
    labels = tuple((a, b) for a in range(n) for b in range(n))
    mats = np.stack(
        [np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b) for a, b in labels]
    )
    return WeylSystem(n, labels, mats)


def _phase_key(U, digits=9):
    flat = U.ravel()
    lead = flat[np.argmax(np.abs(flat) > 1e-6)]
    V = U * (abs(lead) / lead)
    return V, tuple(np.round(V.ravel(), digits).tolist())


def clifford_unitaries(n: int, max_order: int = 20_000) -> np.ndarray:
    """The Clifford group of ``Z_n x Z_n`` modulo phases, generated by the
    normalized Fourier matrix and the quadratic phase gate."""
    w = np.exp(2j * np.pi / n)
    j = np.arange(n)
    F = np.exp(2j * np.pi * np.outer(j, j) / n) / np.sqrt(n)
    if n % 2 == 0:
        S = np.diag(np.exp(1j * np.pi * j * j / n))
    else:
        S = np.diag(w ** (j * (j - 1) // 2))
    ident, key = _phase_key(np.eye(n, dtype=complex))
    seen = {key: ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for U in frontier:
            for g in (F, S):
                V, key = _phase_key(g @ U)
                if key not in seen:
                    seen[key] = V
                    nxt.append(V)
        if len(seen) > max_order:
            raise ConstructionError(f"Clifford group for n={n} exceeds {max_order} elements")
        frontier = nxt
    return np.stack(list(seen.values()))


def weyl_model(n: int, twirl="clifford", tol: float = M.DEFAULT_TOL) -> M.MagicModel:
    """Model on ``N = n**2`` points with ``P_gh = Proj(U_g x U_h^*)``, K = n**2.

    The vectors live in ``M_n`` with the trace inner product.  ``x`` runs over
    the fibers: the Clifford group (default, uniform weights), an explicit
    array of unitaries, or ``None`` for the single fiber ``x = 1``.  With the
    Clifford fibers the model is doubly flat for prime ``n``.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    W = weyl_system(n).matrices
    if twirl is None:
        xs = np.eye(n, dtype=complex)[None]
    elif isinstance(twirl, str) and twirl == "clifford":
        xs = clifford_unitaries(n)
    else:
        xs = np.asarray(twirl, dtype=complex)
        if xs.ndim == 2:
            xs = xs[None]
    N = n * n
    grids = np.empty((len(xs), N, N, N, N), dtype=complex)
    Wh = W.conj().swapaxes(-1, -2)
    for f, x in enumerate(xs):
        V = np.einsum("grs,st,htu->ghru", W, x, Wh).reshape(N, N, N) / np.sqrt(n)
        grids[f] = np.einsum("ghr,ghs->ghrs", V, V.conj())
    model = M.MagicModel(N, N, [Fraction(1, len(xs))] * len(xs), grids)
    _require_magic(model, tol)
    return model


# ---------------------------------------------------------------------------
# S_3


# letters a..f -> 0..5 in each cell of the 3 x 3 magic matrix
S3_PATTERN = (
    ((0, 1), (2, 3), (4, 5)),
    ((2, 5), (0, 4), (1, 3)),
    ((4, 3), (1, 5), (0, 2)),
)


def random_orthonormal_basis(dim: int, seed: int | None = None) -> np.ndarray:
    """Columns of a Haar-random unitary, deterministic for a given seed."""
    return unitary_group.rvs(dim, random_state=np.random.default_rng(seed))


def s3_minimal_model(basis=None, seed: int | None = None, tol: float = M.DEFAULT_TOL) -> M.MagicModel:
    """``u = (a+b, c+d, e+f; c+f, a+e, b+d; e+d, b+f, a+c)`` with a..f the
    rank-one projections onto six orthonormal vectors (columns of ``basis``)."""
    if basis is None:
        basis = random_orthonormal_basis(6, seed)
    B = np.asarray(basis, dtype=complex)
    if B.shape != (6, 6):
        raise ValueError(f"need 6 vectors in dimension 6, got shape {B.shape}")
    if np.abs(B.conj().T @ B - np.eye(6)).max() > tol:
        raise ValueError("basis vectors are not orthonormal")
    proj = np.einsum("ra,sa->ars", B, B.conj())
    grid = np.empty((3, 3, 6, 6), dtype=complex)
    for i in range(3):
        for j in range(3):
            x, y = S3_PATTERN[i][j]
            grid[i, j] = proj[x] + proj[y]
    model = M.MagicModel(3, 6, (Fraction(1),), grid[None])
    _require_magic(model, tol)
    return model


@dataclass
class StationarityReport:
    max_k: int
    deviations: dict[int, float]
    stationary: bool
    tol: float
    note: str = field(default="checked on all words up to max_k; evidence, not proof")

    def as_dict(self):
        return {
            "max_k": self.max_k,
            "deviations": {str(k): v for k, v in self.deviations.items()},
            "stationary": self.stationary,
            "tol": self.tol,
            "note": self.note,
        }


def check_stationary(
    m: M.MagicModel, G: PermutationGroup, max_k: int = 4, tol: float = M.DEFAULT_TOL
) -> StationarityReport:
    """Compare model traces of all words of length <= max_k with integrals over ``G``."""
    if m.n != G.n:
        raise ValueError(f"model on {m.n} points against group of degree {G.n}")
    devs = {}
    for k in range(1, max_k + 1):
        T = M.word_traces(m, k, max_dim=max(M.MAX_TRANSFER_DIM, m.n**k))
        C, order = haar_table(G, k)
        devs[k] = float(np.abs(T - C / order).max())
    return StationarityReport(max_k, devs, all(v <= tol for v in devs.values()), tol)
