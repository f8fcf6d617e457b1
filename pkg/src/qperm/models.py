"""Magic matrix models and the analyzers built on them.

A :class:`MagicModel` is a finite weighted family of fibers, each an N x N grid
of K x K projections.  Integration over the model space is the weighted
average over fibers, and ``tr`` is the normalized trace (``tr(1) = 1``).

The transfer matrix at word length k has entries

    T[(i1..ik), (j1..jk)] = sum_f w_f tr(P_{i1 j1} ... P_{ik jk})

and the Cesaro limit of its powers is the Haar projection of the Hopf image
of the model onto ``Fix(u^{(x)k})``.
"""
from __future__ import annotations

import enum
import json
import logging
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    BoundsError,
    ConvergenceError,
    NumericalDegeneracyError,
    NumericalIntegrityError,
    ResourceError,
    StructuralError,
)

logger = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_TOL",
    "ORBIT_THRESHOLD",
    "TOL_CONV",
    "MAX_ITER",
    "MAX_TRANSFER_DIM",
    "MagicModel",
    "MagicReport",
    "FlatnessReport",
    "FlatCheck",
    "IndexSet",
    "TransferMatrix",
    "CesaroResult",
    "FixedDim",
    "TransitivityReport",
    "OrbitalStructure",
    "verify_magic",
    "flatness_profile",
    "trace_table2",
    "check_double_flat",
    "check_triple_flat",
    "word_traces",
    "transfer_matrix",
    "cesaro_limit",
    "fixed_dim",
    "classify_transitivity",
    "orbital_structure",
    "j_transitivity_sum",
    "j_tuples",
    "graph_to_dot",
    "model_to_dict",
    "model_from_dict",
    "save_model",
    "load_model",
]

DEFAULT_TOL = 1e-9
ORBIT_THRESHOLD = 1e-8
TOL_CONV = 1e-10
MAX_ITER = 10_000
MAX_TRANSFER_DIM = 4096


@dataclass(frozen=True, eq=False)
class MagicModel:
    """Weighted fibers of N x N grids of K x K matrices.

    ``grids`` has shape ``(F, N, N, K, K)``; ``weights`` are positive
    fractions summing to one.
    """

    n: int
    kdim: int
    weights: tuple[Fraction, ...]
    grids: np.ndarray

    def __post_init__(self):
        grids = np.array(self.grids, dtype=complex)
        if grids.ndim == 4:
            grids = grids[None]
        F = grids.shape[0]
        if grids.shape != (F, self.n, self.n, self.kdim, self.kdim) or F == 0:
            raise StructuralError(
                f"grids shape {grids.shape} does not match n={self.n}, kdim={self.kdim}"
            )
        weights = tuple(Fraction(w) for w in self.weights)
        if len(weights) != F:
            raise StructuralError(f"{len(weights)} weights for {F} fibers")
        if any(w <= 0 for w in weights) or sum(weights) != 1:
            raise StructuralError("fiber weights must be positive and sum to 1")
        grids.setflags(write=False)
        object.__setattr__(self, "grids", grids)
        object.__setattr__(self, "weights", weights)

    @property
    def num_fibers(self) -> int:
        return self.grids.shape[0]

    @property
    def fibers(self) -> list[tuple[Fraction, np.ndarray]]:
        return list(zip(self.weights, self.grids))

    @property
    def float_weights(self) -> np.ndarray:
        return np.array([float(w) for w in self.weights])


def _to_dict(obj):
    d = asdict(obj)
    for key, v in list(d.items()):
        if isinstance(v, np.ndarray):
            d[key] = v.tolist()
        elif isinstance(v, enum.Enum):
            d[key] = v.value
    return d


# ---------------------------------------------------------------------------
# verification and flatness


@dataclass
class MagicReport:
    passed: bool
    projection_defect: float
    selfadjoint_defect: float
    row_defect: float
    column_defect: float
    worst_projection: tuple[int, int, int]  # (fiber, i, j), 1-based i, j
    tol: float

    def as_dict(self):
        return _to_dict(self)


def verify_magic(m: MagicModel, tol: float = DEFAULT_TOL) -> MagicReport:
    """Frobenius-norm defects of the projection and bistochastic conditions."""
    P = m.grids
    sq = np.einsum("fijrs,fijst->fijrt", P, P)
    proj = np.linalg.norm((sq - P).reshape(*P.shape[:3], -1), axis=-1)
    adj = np.linalg.norm((P - P.conj().swapaxes(-1, -2)).reshape(*P.shape[:3], -1), axis=-1)
    eye = np.eye(m.kdim)
    rows = np.linalg.norm((P.sum(axis=2) - eye).reshape(P.shape[0], m.n, -1), axis=-1)
    cols = np.linalg.norm((P.sum(axis=1) - eye).reshape(P.shape[0], m.n, -1), axis=-1)
    f, i, j = np.unravel_index(int(np.argmax(proj)), proj.shape)
    defects = [float(proj.max()), float(adj.max()), float(rows.max()), float(cols.max())]
    return MagicReport(
        passed=max(defects) <= tol,
        projection_defect=defects[0],
        selfadjoint_defect=defects[1],
        row_defect=defects[2],
        column_defect=defects[3],
        worst_projection=(int(f), int(i) + 1, int(j) + 1),
        tol=tol,
    )


@dataclass
class FlatnessReport:
    ranks: np.ndarray  # (F, N, N)
    is_flat: bool
    common_rank: int | None
    traces: np.ndarray  # weighted normalized traces tr(P_ij), (N, N)
    max_trace_defect: float | None  # |tr(P_ij) - R/K| when flat

    def as_dict(self):
        return _to_dict(self)


def flatness_profile(m: MagicModel, tol: float = DEFAULT_TOL) -> FlatnessReport:
    """Ranks of every entry, counted as eigenvalues above 1/2."""
    P = m.grids
    H = (P + P.conj().swapaxes(-1, -2)) / 2
    ev = np.linalg.eigvalsh(H)
    close = np.abs(ev - 0.5) <= tol
    if close.any():
        f, i, j, _ = np.argwhere(close)[0]
        raise NumericalDegeneracyError(
            f"eigenvalue within {tol} of 1/2 at fiber {f}, entry ({i + 1},{j + 1})"
        )
    ranks = (ev > 0.5).sum(axis=-1)
    flat = bool((ranks == ranks.flat[0]).all())
    traces = np.einsum("f,fijrr->ij", m.float_weights, P).real / m.kdim
    R = int(ranks.flat[0]) if flat else None
    defect = float(np.abs(traces - R / m.kdim).max()) if flat else None
    return FlatnessReport(ranks, flat, R, traces, defect)


def trace_table2(m: MagicModel) -> np.ndarray:
    """``M[i, j, k, l] = sum_f w_f tr(P_ij P_kl)`` (real part)."""
    N, K = m.n, m.kdim
    out = np.zeros((N * N, N * N), dtype=complex)
    for w, G in zip(m.float_weights, m.grids):
        A = G.reshape(N * N, K * K)
        B = G.swapaxes(-1, -2).reshape(N * N, K * K)
        out += w * (A @ B.T)
    return (out.real / K).reshape(N, N, N, N)


@dataclass
class FlatCheck:
    passed: bool
    max_deviation: float
    worst: tuple[int, ...]  # 1-based indices of the worst cell
    expected_offdiagonal: float
    tol: float
    deviations: np.ndarray = field(repr=False)

    def as_dict(self):
        d = _to_dict(self)
        d.pop("deviations")
        return d


def check_double_flat(m: MagicModel, tol: float = DEFAULT_TOL) -> FlatCheck:
    """Compare ``tr(P_ij P_kl)`` with ``1/N``, ``0``, ``1/N(N-1)``."""
    N = m.n
    M = trace_table2(m)
    i, j, k, l = np.ogrid[:N, :N, :N, :N]
    same_row, same_col = (i == k), (j == l)
    off = 1.0 / (N * (N - 1)) if N > 1 else 0.0
    expected = np.where(
        same_row & same_col, 1.0 / N, np.where(same_row | same_col, 0.0, off)
    )
    dev = np.abs(M - expected)
    worst = np.unravel_index(int(np.argmax(dev)), dev.shape)
    mx = float(dev.max())
    return FlatCheck(mx <= tol, mx, tuple(int(x) + 1 for x in worst), off, tol, dev)


def check_triple_flat(m: MagicModel, tol: float = DEFAULT_TOL, max_dim: int = MAX_TRANSFER_DIM) -> FlatCheck:
    """``tr(P_ij P_kl P_pq) = 1/N(N-1)(N-2)`` for distinct (i,k,p), (j,l,q)."""
    N = m.n
    if N < 3:
        raise ValueError(f"triple flatness needs N >= 3, got {N}")
    T = word_traces(m, 3, max_dim=max_dim).reshape((N,) * 6)
    target = 1.0 / (N * (N - 1) * (N - 2))
    a, b, c = np.ogrid[:N, :N, :N]
    distinct = ((a != b) & (b != c) & (a != c)).astype(bool)
    mask = distinct[:, :, :, None, None, None] & distinct[None, None, None, :, :, :]
    dev = np.where(mask, np.abs(T - target), 0.0)
    worst = np.unravel_index(int(np.argmax(dev)), dev.shape)
    mx = float(dev.max())
    return FlatCheck(mx <= tol, mx, tuple(int(x) + 1 for x in worst), target, tol, dev)


# ---------------------------------------------------------------------------
# transfer matrices


class IndexSet(str, enum.Enum):
    FULL = "full"
    JSET = "jset"


def j_tuples(n: int, k: int) -> list[tuple[int, ...]]:
    """``J_n^k``: 1-based k-tuples with consecutive entries distinct."""
    return [t for t in product(range(1, n + 1), repeat=k) if all(a != b for a, b in zip(t, t[1:]))]


def word_traces(m: MagicModel, k: int, max_dim: int = MAX_TRANSFER_DIM) -> np.ndarray:
    """Full transfer matrix of shape ``(N^k, N^k)``, rows = i-tuples, cols = j-tuples."""
    if k < 1:
        raise BoundsError(f"word length must be positive, got {k}")
    N, K = m.n, m.kdim
    dim = N**k
    if dim > max_dim:
        raise ResourceError(f"transfer matrix dimension {dim} exceeds cap {max_dim}")
    acc = np.zeros((N ** (2 * (k - 1)), N * N), dtype=complex)
    for w, G in zip(m.float_weights, m.grids):
        A = G.reshape(N * N, K, K)
        if k == 1:
            acc += w * np.einsum("arr->a", A)[None]
            continue
        cur = A
        for _ in range(k - 2):
            cur = np.einsum("ars,bst->abrt", cur, A).reshape(-1, K, K)
        # trace of (cur @ A_b) = sum_rs cur[r,s] A_b[s,r]
        acc += w * (cur.reshape(cur.shape[0], K * K) @ A.swapaxes(-1, -2).reshape(N * N, K * K).T)
    acc /= K
    # axes (i1, j1, ..., ik, jk) -> (i1..ik, j1..jk)
    T = acc.reshape((N,) * (2 * k))
    T = T.transpose(list(range(0, 2 * k, 2)) + list(range(1, 2 * k, 2)))
    return T.reshape(dim, dim)


@dataclass
class TransferMatrix:
    k: int
    index_set: IndexSet
    indices: list[tuple[int, ...]]  # 1-based tuples labelling rows and columns
    entries: np.ndarray
    row_sum_defect: float
    spectral_radius: float

    @property
    def dim(self) -> int:
        return len(self.indices)


def _spectral_radius(T):
    if T.shape[0] <= 1024:
        return float(np.abs(np.linalg.eigvals(T)).max())
    from scipy.sparse.linalg import eigs

    vals = eigs(T, k=1, which="LM", return_eigenvectors=False, tol=1e-12)
    return float(np.abs(vals).max())


def transfer_matrix(
    m: MagicModel,
    k: int,
    index_set=IndexSet.FULL,
    max_dim: int = MAX_TRANSFER_DIM,
    tol: float = DEFAULT_TOL,
) -> TransferMatrix:
    index_set = IndexSet(index_set)
    N = m.n
    size = N**k if index_set is IndexSet.FULL else N * (N - 1) ** (k - 1)
    if size > max_dim:
        raise ResourceError(f"transfer matrix dimension {size} exceeds cap {max_dim}")
    T = word_traces(m, k, max_dim=max(max_dim, N**k))
    idx = list(product(range(1, N + 1), repeat=k))
    if index_set is IndexSet.JSET:
        keep = [a for a, t in enumerate(idx) if all(x != y for x, y in zip(t, t[1:]))]
        T = T[np.ix_(keep, keep)]
        idx = [idx[a] for a in keep]
    if np.abs(T.imag).max() <= 1e-13:
        T = T.real.copy()
    defect = float(np.abs(T.sum(axis=1) - 1).max())
    rho = _spectral_radius(T)
    if rho > 1 + tol:
        raise NumericalIntegrityError(f"spectral radius {rho} exceeds 1 + {tol}")
    return TransferMatrix(k, index_set, idx, T, defect, rho)


@dataclass
class CesaroResult:
    limit: np.ndarray
    iterations: int  # number of powers averaged
    residual: float  # distance between the last two estimates
    method: str  # "plain" or "extrapolated"


def cesaro_limit(T: np.ndarray, tol_conv: float = TOL_CONV, max_iter: int = MAX_ITER) -> CesaroResult:
    """Limit of ``(1/n) sum_{m=1}^n T^m``.

    Averages are doubled, ``A_2n = (A_n + T^n A_n) / 2``.  Plain averages
    approach the limit like ``1/n`` as soon as ``T`` is not idempotent, so the
    ``1/n`` term is cancelled by the extrapolation ``2 A_2n - A_n``; both
    sequences are monitored and whichever settles first below ``tol_conv``
    is returned.
    """
    T = np.asarray(T)
    A = T.copy()
    Pw = T
    n = 1
    E_prev = None
    residual = np.inf
    while 2 * n <= max_iter:
        A2 = (A + Pw @ A) / 2
        n *= 2
        raw = float(np.linalg.norm(A2 - A))
        if raw < tol_conv:
            return CesaroResult(A2, n, raw, "plain")
        E = 2 * A2 - A
        if E_prev is not None:
            residual = float(np.linalg.norm(E - E_prev))
            if residual < tol_conv:
                return CesaroResult(E, n, residual, "extrapolated")
        E_prev, A = E, A2
        if 2 * n <= max_iter:
            Pw = Pw @ Pw
    raise ConvergenceError(
        f"Cesaro averages did not converge after {n} terms (residual {residual:.3g})",
        residual=residual,
        iterations=n,
    )


@dataclass
class FixedDim:
    dim: int
    trace: float
    iterations: int
    residual: float
    method: str
    # distance of the closest singular value to the 1/2 threshold
    margin: float

    def __int__(self):
        return self.dim

    def as_dict(self):
        return _to_dict(self)


def _rank_of_limit(res: CesaroResult) -> FixedDim:
    s = np.linalg.svd(res.limit, compute_uv=False)
    dim = int((s > 0.5).sum())
    margin = float(np.abs(s - 0.5).min()) if s.size else 0.5
    if margin < 0.25:
        logger.warning("Cesaro limit has a singular value near 1/2 (margin %.3g)", margin)
    return FixedDim(dim, float(np.trace(res.limit).real), res.iterations, res.residual, res.method, margin)


def fixed_dim(
    m: MagicModel,
    k: int,
    tol_conv: float = TOL_CONV,
    max_iter: int = MAX_ITER,
    max_dim: int = MAX_TRANSFER_DIM,
) -> FixedDim:
    """``dim Fix(u^{(x)k})`` of the Hopf image, as the rank of the Cesaro limit."""
    T = transfer_matrix(m, k, IndexSet.FULL, max_dim=max_dim)
    return _rank_of_limit(cesaro_limit(T.entries, tol_conv, max_iter))


@dataclass
class TransitivityReport:
    transitive: bool
    doubly: bool
    triply: bool
    dims: tuple[int, int, int]
    iterations: tuple[int, int, int]

    def as_dict(self):
        return _to_dict(self)


def classify_transitivity(m: MagicModel, **kw) -> TransitivityReport:
    fd = [fixed_dim(m, k, **kw) for k in (1, 2, 3)]
    dims = tuple(f.dim for f in fd)
    return TransitivityReport(
        transitive=dims[0] == 1,
        doubly=dims[1] == 2,
        triply=dims[2] == 5,
        dims=dims,
        iterations=tuple(f.iterations for f in fd),
    )


def j_transitivity_sum(
    m: MagicModel, k: int, tol_conv: float = TOL_CONV, max_iter: int = MAX_ITER
) -> float:
    """Trace of the Cesaro limit on ``J_N^k``; equals 1 iff the coaction there is transitive."""
    T = transfer_matrix(m, k, IndexSet.JSET)
    res = cesaro_limit(T.entries, tol_conv, max_iter)
    return float(np.trace(res.limit).real)


# ---------------------------------------------------------------------------
# orbits and orbitals


@dataclass
class OrbitalStructure:
    k: int
    points: list  # 1-based labels: ints for k=1, pairs for k=2
    classes: list[list]
    edges: list[tuple]  # the thresholded relation before closure
    closure_changed: bool
    near_threshold: list[tuple]  # (a, b, value) with value within 100x of the threshold

    @property
    def num_classes(self):
        return len(self.classes)

    def as_dict(self):
        return {
            "k": self.k,
            "classes": [[list(p) if isinstance(p, tuple) else p for p in c] for c in self.classes],
            "num_classes": self.num_classes,
            "closure_changed": self.closure_changed,
            "near_threshold": [[list(a) if isinstance(a, tuple) else a,
                                list(b) if isinstance(b, tuple) else b, v]
                               for a, b, v in self.near_threshold],
        }


def _classes_from_relation(R: np.ndarray):
    """Connected components of a symmetric boolean relation."""
    ncomp, labels = connected_components(csr_matrix(R), directed=False)
    groups: dict[int, list[int]] = {}
    for a, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(a)
    classes = sorted(groups.values(), key=lambda g: g[0])
    same = labels[:, None] == labels[None, :]
    changed = not np.array_equal(same, R | np.eye(len(R), dtype=bool))
    return classes, changed


def orbital_structure(m: MagicModel, k: int = 1, threshold: float = ORBIT_THRESHOLD) -> OrbitalStructure:
    """Orbits (k=1) or orbitals (k=2) from the nonvanishing pattern of the model."""
    N = m.n
    if k == 1:
        norms = np.linalg.norm(m.grids.reshape(m.num_fibers, N, N, -1), axis=-1).max(axis=0)
        vals = norms
        points = list(range(1, N + 1))
    elif k == 2:
        M = trace_table2(m)
        # (i,k) ~ (j,l)  <=>  tr(P_ij P_kl) > threshold
        vals = M.transpose(0, 2, 1, 3).reshape(N * N, N * N)
        points = [(i, j) for i in range(1, N + 1) for j in range(1, N + 1)]
    else:
        raise ValueError("orbital structure is defined for k = 1 or 2")
    R = vals > threshold
    R = R | R.T
    edges = [(points[a], points[b]) for a, b in zip(*np.nonzero(np.triu(R, 1)))]
    near = [
        (points[a], points[b], float(vals[a, b]))
        for a, b in zip(*np.nonzero((np.abs(vals) > threshold / 100) & (np.abs(vals) < threshold * 100)))
    ]
    classes, changed = _classes_from_relation(R)
    return OrbitalStructure(
        k=k,
        points=points,
        classes=[[points[a] for a in c] for c in classes],
        edges=edges,
        closure_changed=changed,
        near_threshold=near,
    )


def _dot_label(x):
    if isinstance(x, tuple):
        return '"(' + ",".join(map(str, x)) + ')"'
    return f'"{x}"'


def graph_to_dot(nodes: Sequence, edges: Sequence[tuple], name: str = "G") -> str:
    lines = [f"graph {name} {{"]
    lines += [f"  {_dot_label(v)};" for v in nodes]
    lines += [f"  {_dot_label(a)} -- {_dot_label(b)};" for a, b in edges]
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# JSON model files


def _frac_to_json(x: Fraction):
    return {"num": str(x.numerator), "den": str(x.denominator)}


def _frac_from_json(d) -> Fraction:
    return Fraction(int(d["num"]), int(d["den"]))


def model_to_dict(m: MagicModel) -> dict:
    fibers = []
    for w, G in m.fibers:
        pairs = np.stack([G.real, G.imag], axis=-1)
        fibers.append({"weight": _frac_to_json(w), "grid": pairs.tolist()})
    return {"n": m.n, "k_dim": m.kdim, "fibers": fibers}


def model_from_dict(d: dict) -> MagicModel:
    try:
        n, K = int(d["n"]), int(d["k_dim"])
        weights = [_frac_from_json(f["weight"]) for f in d["fibers"]]
        raw = [np.asarray(f["grid"], dtype=float) for f in d["fibers"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise StructuralError(f"malformed model document: {exc}") from exc
    for g in raw:
        if g.shape != (n, n, K, K, 2):
            raise StructuralError(f"grid of shape {g.shape}, expected {(n, n, K, K, 2)}")
    grids = np.stack([g[..., 0] + 1j * g[..., 1] for g in raw]) if raw else np.zeros((0, n, n, K, K))
    return MagicModel(n, K, weights, grids)


def save_model(m: MagicModel, path) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(m), fh)


def load_model(path) -> MagicModel:
    with open(path) as fh:
        return model_from_dict(json.load(fh))
