"""Multigrid solver for Laplacian systems of connected graphs.

The hierarchy alternates two coarsening stages.  Elimination removes an
independent set of low-degree nodes exactly via the Schur complement;
aggregation partitions nodes by the affinity of relaxed test vectors and
coarsens with the Galerkin product of the piecewise-constant interpolation.
Solves run V-cycles with Gauss-Seidel smoothing and an energy line search
on the coarse-grid correction.  If the cycles stagnate, the solver falls
back to flexible conjugate gradients preconditioned by one V-cycle, and
as a last resort to Jacobi-preconditioned CG, so the residual contract
holds on any connected input.

Singularity of the Laplacian is handled by mean-centering supplies and
iterates; the coarsest level is factorized densely with one node grounded.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import spsolve_triangular

from .errors import ConvergenceError, DomainError

__all__ = [
    "SolverConfig",
    "LevelKind",
    "Level",
    "MultigridHierarchy",
    "PotentialVector",
    "setup",
    "coarsen_eliminate",
    "coarsen_aggregate",
    "relaxed_test_vectors",
    "solve",
    "solve_many",
]

# Fixed algorithm parameters (not part of the public configuration).
AFFINITY_THRESHOLD = 0.5
TEST_VECTOR_SWEEPS = 3
MAX_AGGREGATE_SIZE = 8        # unbounded growth destroys mesh convergence
ATTACH_SWEEPS = 3             # attachment passes after seeding
MIN_REDUCTION = 0.10          # a stage must shrink the level by 10% to be used
STAGNATION_FACTOR = 0.9
STAGNATION_CYCLES = 5
FCG_MAX_ITERS = 200
BLOCK_COLUMNS = 64            # fixed so results never depend on thread count
STOP_MARGIN = 0.9             # iterate slightly past tau so independently
                              # recomputed residuals stay below it


@dataclass(frozen=True)
class SolverConfig:
    """Tuning knobs for hierarchy construction and solves.

    ``smoothing_steps`` is (pre, post) Gauss-Seidel sweeps per V-cycle.
    """

    tau: float = 1e-5
    max_cycles: int = 100
    max_direct_size: int = 200
    smoothing_steps: tuple[int, int] = (1, 2)
    elimination_degree_cap: int = 4
    aggregation_test_vectors: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.tau <= 0:
            raise DomainError("tau must be positive")
        counts = (
            self.max_cycles,
            self.max_direct_size,
            self.smoothing_steps[0],
            self.smoothing_steps[1],
            self.elimination_degree_cap,
            self.aggregation_test_vectors,
        )
        if any(c < 1 for c in counts):
            raise DomainError("all solver counts must be >= 1")


class LevelKind(Enum):
    ELIMINATION = "elimination"
    AGGREGATION = "aggregation"
    COARSEST = "coarsest"


@dataclass
class Level:
    """One hierarchy level: its Laplacian plus transfer data to the next."""

    kind: LevelKind
    matrix: sp.csr_matrix
    # elimination transfer
    f_nodes: np.ndarray | None = None
    c_nodes: np.ndarray | None = None
    f_degree: np.ndarray | None = None
    w_cf: sp.csr_matrix | None = None
    w_fc: sp.csr_matrix | None = None
    # aggregation transfer
    p: sp.csr_matrix | None = None
    aggregates: np.ndarray | None = None
    # Gauss-Seidel factors (aggregation levels only)
    m_lower: sp.csr_matrix | None = None
    m_upper: sp.csr_matrix | None = None
    # coarsest-level dense factorization of the grounded system
    grounded_factor: tuple | None = None

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


@dataclass
class SolveStats:
    """Aggregate bookkeeping across solves on one hierarchy."""

    solves: int = 0
    max_residual: float = 0.0
    fallback_solves: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def record(self, residuals: np.ndarray, fallbacks: int) -> None:
        with self._lock:
            self.solves += residuals.size
            if residuals.size:
                self.max_residual = max(self.max_residual, float(residuals.max()))
            self.fallback_solves += fallbacks


@dataclass
class MultigridHierarchy:
    levels: list[Level]
    config: SolverConfig
    stats: SolveStats = field(default_factory=SolveStats)

    @property
    def n(self) -> int:
        return self.levels[0].size

    @property
    def level_sizes(self) -> list[int]:
        return [lvl.size for lvl in self.levels]


@dataclass
class PotentialVector:
    """Solution of ``L p = b`` normalized to zero mean."""

    values: np.ndarray
    achieved_residual: float


def _max_abs(matrix: sp.spmatrix) -> float:
    return float(np.abs(matrix.data).max()) if matrix.nnz else 0.0


def _rebuild_laplacian(matrix: sp.spmatrix) -> sp.csr_matrix:
    """Symmetrize and restore exact zero row sums after sparse products.

    Off-diagonal entries that turned nonnegative through roundoff are
    dropped; the diagonal is rebuilt as minus the off-diagonal row sum,
    so every level is a Laplacian by construction.
    """
    matrix = matrix.tocsr()
    matrix = (matrix + matrix.T) * 0.5
    coo = matrix.tocoo()
    off = (coo.row != coo.col) & (coo.data < 0)
    r, c, v = coo.row[off], coo.col[off], coo.data[off]
    n = matrix.shape[0]
    diag = np.zeros(n)
    np.add.at(diag, r, -v)
    idx = np.arange(n)
    lap = sp.csr_matrix(
        (np.r_[v, diag], (np.r_[r, idx], np.r_[c, idx])), shape=(n, n)
    )
    lap.sort_indices()
    return lap


def _validate_laplacian(matrix: sp.spmatrix) -> sp.csr_matrix:
    if matrix.shape[0] != matrix.shape[1]:
        raise DomainError("matrix must be square")
    matrix = matrix.tocsr()
    n = matrix.shape[0]
    scale = _max_abs(matrix)
    tol = 1e-12 * n * max(scale, 1.0)
    asym = abs(matrix - matrix.T)
    if asym.nnz and asym.data.max() > tol:
        raise DomainError("matrix is not symmetric")
    rowsums = np.asarray(matrix.sum(axis=1)).ravel()
    if np.abs(rowsums).max(initial=0.0) > tol:
        raise DomainError("row sums are not zero; not a Laplacian")
    coo = matrix.tocoo()
    off = coo.row != coo.col
    if off.any() and coo.data[off].max() > tol:
        raise DomainError("positive off-diagonal entry; not a Laplacian")
    if n > 1:
        ncomp, _ = connected_components(matrix, directed=False)
        if ncomp > 1:
            raise DomainError("Laplacian graph is not connected")
    return _rebuild_laplacian(matrix)


@dataclass
class EliminationRecord:
    f_nodes: np.ndarray
    c_nodes: np.ndarray
    f_degree: np.ndarray
    w_cf: sp.csr_matrix


def coarsen_eliminate(
    matrix: sp.csr_matrix, degree_cap: int = 4
) -> tuple[sp.csr_matrix, EliminationRecord | None]:
    """Exact Schur-complement elimination of an independent low-degree set.

    Nodes with at most ``degree_cap`` neighbors are selected greedily in
    ascending id order subject to pairwise independence.  Returns the
    Schur complement on the remaining nodes (again a Laplacian) and the
    back-substitution record, or ``(matrix, None)`` when no node is
    eligible.
    """
    matrix = matrix.tocsr()
    n = matrix.shape[0]
    indptr, indices = matrix.indptr, matrix.indices
    rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    offdeg = np.bincount(rows[indices != rows], minlength=n)
    blocked = np.zeros(n, dtype=bool)
    chosen: list[int] = []
    for i in np.nonzero(offdeg <= degree_cap)[0]:
        if blocked[i]:
            continue
        chosen.append(int(i))
        blocked[indices[indptr[i]:indptr[i + 1]]] = True
        blocked[i] = True
    if len(chosen) == n and n > 0:
        chosen.pop()  # never eliminate every node
    if not chosen:
        return matrix, None

    f = np.asarray(chosen, dtype=np.int64)
    in_f = np.zeros(n, dtype=bool)
    in_f[f] = True
    c = np.nonzero(~in_f)[0]
    d_f = matrix.diagonal()[f]
    l_cf = matrix[c][:, f].tocsr()
    w_cf = (-l_cf).tocsr()
    schur = matrix[c][:, c] - w_cf @ sp.diags(1.0 / d_f) @ w_cf.T
    return _rebuild_laplacian(schur), EliminationRecord(
        f_nodes=f, c_nodes=c, f_degree=d_f, w_cf=w_cf
    )


def relaxed_test_vectors(
    matrix: sp.csr_matrix, count: int, rng: np.random.Generator
) -> np.ndarray:
    """Mean-free random vectors smoothed by Gauss-Seidel sweeps on Lx=0."""
    n = matrix.shape[0]
    vectors = rng.standard_normal((n, count))
    vectors -= vectors.mean(axis=0, keepdims=True)
    lower = sp.tril(matrix, 0, format="csr")
    for _ in range(TEST_VECTOR_SWEEPS):
        vectors += spsolve_triangular(lower, -(matrix @ vectors), lower=True)
    vectors -= vectors.mean(axis=0, keepdims=True)
    return vectors


def coarsen_aggregate(
    matrix: sp.csr_matrix, test_vectors: np.ndarray
) -> tuple[sp.csr_matrix, np.ndarray]:
    """Affinity-based greedy aggregation with Galerkin coarse operator.

    The affinity of two nodes is the squared normalized inner product of
    their test-vector samples.  Seeds are first chosen as a greedy
    independent set (ascending id), which keeps aggregates compact; every
    remaining node then joins the neighboring aggregate of maximal
    affinity when that affinity exceeds the threshold, and otherwise
    becomes a seed itself.  Aggregates are capped at
    ``MAX_AGGREGATE_SIZE`` members: on smooth problems nearly every
    affinity clears the threshold, and unbounded aggregates grow into
    shapes that piecewise-constant interpolation cannot represent.

    Returns the coarse Laplacian ``P.T @ L @ P`` and the node-to-aggregate
    map.  A partition always exists; with all-singleton aggregates the
    stage is simply non-reducing.
    """
    matrix = matrix.tocsr()
    n = matrix.shape[0]
    indptr, indices = matrix.indptr, matrix.indices
    x = np.ascontiguousarray(test_vectors)
    norms2 = np.einsum("ij,ij->i", x, x)
    agg = -np.ones(n, dtype=np.int64)
    agg_size: list[int] = []
    blocked = np.zeros(n, dtype=bool)
    next_id = 0
    for u in range(n):
        if blocked[u]:
            continue
        agg[u] = next_id
        agg_size.append(1)
        next_id += 1
        blocked[indices[indptr[u]:indptr[u + 1]]] = True
        blocked[u] = True

    for _ in range(ATTACH_SWEEPS):
        attached_any = False
        for u in range(n):
            if agg[u] >= 0:
                continue
            nbrs = indices[indptr[u]:indptr[u + 1]]
            nbrs = nbrs[nbrs != u]
            nbrs = nbrs[agg[nbrs] >= 0]
            if nbrs.size == 0 or norms2[u] <= 0:
                continue
            dots = x[nbrs] @ x[u]
            denom = norms2[nbrs] * norms2[u]
            with np.errstate(divide="ignore", invalid="ignore"):
                aff = np.where(denom > 0, dots * dots / denom, 0.0)
            for best in np.argsort(-aff, kind="stable"):
                if aff[best] <= AFFINITY_THRESHOLD:
                    break
                target = agg[nbrs[best]]
                if agg_size[target] < MAX_AGGREGATE_SIZE:
                    agg[u] = target
                    agg_size[target] += 1
                    attached_any = True
                    break
        if not attached_any:
            break

    for u in range(n):
        if agg[u] < 0:
            agg[u] = next_id
            agg_size.append(1)
            next_id += 1
    return _galerkin(matrix, agg, next_id), agg


def _matching_aggregation(
    matrix: sp.csr_matrix, test_vectors: np.ndarray
) -> tuple[sp.csr_matrix, np.ndarray]:
    """Pairwise matching by descending affinity; guarantees a reduction
    whenever the graph has at least one edge."""
    matrix = matrix.tocsr()
    n = matrix.shape[0]
    coo = matrix.tocoo()
    upper = (coo.row < coo.col)
    eu, ev = coo.row[upper], coo.col[upper]
    x = test_vectors
    norms2 = np.einsum("ij,ij->i", x, x)
    dots = np.einsum("ij,ij->i", x[eu], x[ev])
    denom = norms2[eu] * norms2[ev]
    aff = np.where(denom > 0, dots * dots / denom, 0.0)
    order = np.lexsort((ev, eu, -aff))
    partner = -np.ones(n, dtype=np.int64)
    for e in order:
        u, v = int(eu[e]), int(ev[e])
        if partner[u] < 0 and partner[v] < 0:
            partner[u] = v
            partner[v] = u
    agg = -np.ones(n, dtype=np.int64)
    next_id = 0
    for u in range(n):
        if agg[u] >= 0:
            continue
        agg[u] = next_id
        if partner[u] > u:
            agg[partner[u]] = next_id
        next_id += 1
    return _galerkin(matrix, agg, next_id), agg


def _galerkin(matrix: sp.csr_matrix, agg: np.ndarray, n_agg: int) -> sp.csr_matrix:
    n = matrix.shape[0]
    p = sp.csr_matrix((np.ones(n), (np.arange(n), agg)), shape=(n, n_agg))
    return _rebuild_laplacian(p.T @ matrix @ p)


def _interpolation(agg: np.ndarray, n_agg: int) -> sp.csr_matrix:
    n = agg.size
    return sp.csr_matrix((np.ones(n), (np.arange(n), agg)), shape=(n, n_agg))


def _factor_coarsest(matrix: sp.csr_matrix) -> tuple | None:
    """Dense factorization of the Laplacian with node 0 grounded."""
    n = matrix.shape[0]
    if n <= 1:
        return None
    dense = matrix.toarray()[1:, 1:]
    try:
        return ("cho", scipy.linalg.cho_factor(dense, lower=True, check_finite=False))
    except scipy.linalg.LinAlgError:
        return ("lu", scipy.linalg.lu_factor(dense, check_finite=False))


def _direct_solve(level: Level, b: np.ndarray) -> np.ndarray:
    if level.size == 1 or level.grounded_factor is None:
        return np.zeros_like(b)
    kind, factor = level.grounded_factor
    x = np.zeros_like(b)
    # One column at a time: LAPACK multi-RHS kernels may reassociate
    # across columns, and solutions must not depend on batch composition.
    for j in range(b.shape[1]):
        if kind == "cho":
            x[1:, j] = scipy.linalg.cho_solve(factor, b[1:, j], check_finite=False)
        else:
            x[1:, j] = scipy.linalg.lu_solve(factor, b[1:, j], check_finite=False)
    x -= x.mean(axis=0, keepdims=True)
    return x


def setup(matrix: sp.spmatrix, config: SolverConfig | None = None) -> MultigridHierarchy:
    """Build the multigrid hierarchy for a connected-graph Laplacian.

    Stages alternate starting with elimination; a stage that would shrink
    the level by less than 10% is skipped in favor of the other.  When
    neither stage clears the bar, the better reduction is taken anyway
    (affinity matching guarantees progress on any graph with edges), so
    the recursion always reaches ``max_direct_size``.
    """
    config = config or SolverConfig()
    current = _validate_laplacian(matrix)
    rng = np.random.default_rng(config.seed)
    levels: list[Level] = []
    preferred = LevelKind.ELIMINATION

    while current.shape[0] > config.max_direct_size:
        n_cur = current.shape[0]
        need = MIN_REDUCTION * n_cur
        candidates: dict[LevelKind, tuple] = {}

        def try_stage(kind: LevelKind):
            if kind in candidates:
                return candidates[kind]
            if kind is LevelKind.ELIMINATION:
                schur, rec = coarsen_eliminate(current, config.elimination_degree_cap)
                red = 0 if rec is None else rec.f_nodes.size
                candidates[kind] = (red, schur, rec, None)
            else:
                vectors = relaxed_test_vectors(
                    current, config.aggregation_test_vectors, rng
                )
                coarse, agg = coarsen_aggregate(current, vectors)
                red = n_cur - (int(agg.max()) + 1)
                if red < need:
                    mcoarse, magg = _matching_aggregation(current, vectors)
                    mred = n_cur - (int(magg.max()) + 1)
                    if mred > red:
                        coarse, agg, red = mcoarse, magg, mred
                candidates[kind] = (red, coarse, agg, vectors)
            return candidates[kind]

        other = (
            LevelKind.AGGREGATION
            if preferred is LevelKind.ELIMINATION
            else LevelKind.ELIMINATION
        )
        applied = None
        for kind in (preferred, other):
            if try_stage(kind)[0] >= need:
                applied = kind
                break
        if applied is None:
            # Neither stage cleared the bar: accept the larger reduction.
            applied = max(candidates, key=lambda k: candidates[k][0])
            if candidates[applied][0] <= 0:
                raise ConvergenceError(
                    "coarsening made no progress", best_residual=float("inf")
                )

        _, coarse, extra, _ = candidates[applied]
        if applied is LevelKind.ELIMINATION:
            rec: EliminationRecord = extra
            levels.append(
                Level(
                    kind=LevelKind.ELIMINATION,
                    matrix=current,
                    f_nodes=rec.f_nodes,
                    c_nodes=rec.c_nodes,
                    f_degree=rec.f_degree,
                    w_cf=rec.w_cf,
                    w_fc=rec.w_cf.T.tocsr(),
                )
            )
        else:
            agg: np.ndarray = extra
            levels.append(
                Level(
                    kind=LevelKind.AGGREGATION,
                    matrix=current,
                    p=_interpolation(agg, int(agg.max()) + 1),
                    aggregates=agg,
                    m_lower=sp.tril(current, 0, format="csr"),
                    m_upper=sp.triu(current, 0, format="csr"),
                )
            )
        current = coarse
        preferred = (
            LevelKind.AGGREGATION
            if applied is LevelKind.ELIMINATION
            else LevelKind.ELIMINATION
        )

    levels.append(
        Level(
            kind=LevelKind.COARSEST,
            matrix=current,
            grounded_factor=_factor_coarsest(current),
        )
    )
    sizes = [lvl.size for lvl in levels]
    assert all(a > b for a, b in zip(sizes, sizes[1:])), sizes
    return MultigridHierarchy(levels=levels, config=config)


def _cycle(levels: list[Level], j: int, b: np.ndarray, nu1: int, nu2: int) -> np.ndarray:
    """One V-cycle for ``L x = b`` starting from zero, on level ``j``."""
    level = levels[j]
    if level.kind is LevelKind.COARSEST:
        return _direct_solve(level, b)

    if level.kind is LevelKind.ELIMINATION:
        # Exact transfer: no smoothing around elimination levels.
        bf = b[level.f_nodes]
        scaled = bf / level.f_degree[:, None]
        bc = b[level.c_nodes] + level.w_cf @ scaled
        xc = _cycle(levels, j + 1, bc, nu1, nu2)
        x = np.empty_like(b)
        x[level.c_nodes] = xc
        x[level.f_nodes] = (bf + level.w_fc @ xc) / level.f_degree[:, None]
        return x

    matrix = level.matrix
    # Pre-smoothing from zero initial guess: first sweep is M^{-1} b.
    x = spsolve_triangular(level.m_lower, b, lower=True)
    for _ in range(nu1 - 1):
        x += spsolve_triangular(level.m_lower, b - matrix @ x, lower=True)
    residual = b - matrix @ x
    xc = _cycle(levels, j + 1, level.p.T @ residual, nu1, nu2)
    direction = level.p @ xc
    l_dir = matrix @ direction
    num = np.einsum("ij,ij->j", residual, direction)
    den = np.einsum("ij,ij->j", direction, l_dir)
    # Energy line search on the coarse correction; plain aggregation
    # under-corrects without it.
    alpha = np.divide(num, den, out=np.ones_like(num), where=den > 0)
    x += direction * alpha
    for _ in range(nu2):
        x += spsolve_triangular(level.m_upper, b - matrix @ x, lower=False)
    return x


def _column_norms(block: np.ndarray) -> np.ndarray:
    return np.sqrt(np.einsum("ij,ij->j", block, block))


def _center(block: np.ndarray) -> np.ndarray:
    return block - block.mean(axis=0, keepdims=True)


def _fcg(
    levels: list[Level],
    x: np.ndarray,
    b: np.ndarray,
    bnorm: np.ndarray,
    tau: float,
    nu1: int,
    nu2: int,
    max_iters: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Flexible CG preconditioned by one V-cycle (warm start ``x``)."""
    matrix = levels[0].matrix
    active = np.arange(b.shape[1])
    res = _column_norms(b - matrix @ x) / bnorm
    direction = np.zeros_like(b)
    l_direction = np.zeros_like(b)
    have_direction = np.zeros(b.shape[1], dtype=bool)
    for _ in range(max_iters):
        active = active[res[active] > tau]
        if active.size == 0:
            break
        r = _center(b[:, active] - matrix @ x[:, active])
        z = _center(_cycle(levels, 0, r, nu1, nu2))
        upd = have_direction[active]
        if upd.any():
            cols = active[upd]
            zl = np.einsum("ij,ij->j", z[:, upd], l_direction[:, cols])
            dl = np.einsum("ij,ij->j", direction[:, cols], l_direction[:, cols])
            beta = np.divide(zl, dl, out=np.zeros_like(zl), where=dl > 0)
            z[:, upd] -= direction[:, cols] * beta
        direction[:, active] = z
        have_direction[active] = True
        l_direction[:, active] = matrix @ z
        dl = np.einsum("ij,ij->j", z, l_direction[:, active])
        rd = np.einsum("ij,ij->j", r, z)
        alpha = np.divide(rd, dl, out=np.zeros_like(rd), where=dl > 0)
        x[:, active] += z * alpha
        x[:, active] = _center(x[:, active])
        res[active] = _column_norms(b[:, active] - matrix @ x[:, active]) / bnorm[active]
    return x, res


def _jacobi_pcg(
    matrix: sp.csr_matrix,
    x: np.ndarray,
    b: np.ndarray,
    bnorm: np.ndarray,
    tau: float,
    max_iters: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Jacobi-preconditioned CG on the mean-centered subspace."""
    dinv = 1.0 / np.maximum(matrix.diagonal(), np.finfo(float).tiny)
    r = _center(b - matrix @ x)
    z = dinv[:, None] * r
    p = z.copy()
    rz = np.einsum("ij,ij->j", r, z)
    res = _column_norms(b - matrix @ x) / bnorm
    frozen = res <= tau
    for _ in range(max_iters):
        if frozen.all():
            break
        lp = matrix @ p
        plp = np.einsum("ij,ij->j", p, lp)
        alpha = np.divide(rz, plp, out=np.zeros_like(rz), where=plp > 0)
        alpha[frozen] = 0.0
        x += p * alpha
        r -= lp * alpha
        res = _column_norms(r) / bnorm
        frozen = frozen | (res <= tau)
        z = dinv[:, None] * r
        rz_new = np.einsum("ij,ij->j", r, z)
        beta = np.divide(rz_new, rz, out=np.zeros_like(rz), where=rz > 0)
        beta[frozen] = 0.0
        p = z + p * beta
        rz = rz_new
    x = _center(x)
    res = _column_norms(b - matrix @ x) / bnorm
    return x, res


def _solve_block(
    hierarchy: MultigridHierarchy, block: np.ndarray, config: SolverConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Solve ``L x = b`` for every column of ``block``.

    Every column is treated independently (frozen at its own convergence
    cycle), so results do not depend on which columns share a block.
    Returns mean-centered solutions and independently recomputed relative
    residuals.
    """
    levels = hierarchy.levels
    matrix = levels[0].matrix
    n = matrix.shape[0]
    if block.shape[0] != n:
        raise DomainError(f"right-hand side length {block.shape[0]} != {n}")
    b = np.array(block, dtype=np.float64, copy=True)
    ncols = b.shape[1]
    x = np.zeros_like(b)
    if ncols == 0:
        return x, np.zeros(0)

    l1 = np.abs(b).sum(axis=0)
    imbalance = np.abs(b.sum(axis=0))
    bad = imbalance > 1e-10 * np.maximum(l1, np.finfo(float).tiny)
    if bad.any():
        raise DomainError(
            f"supply vector columns {np.nonzero(bad)[0].tolist()} are not balanced"
        )
    bnorm = _column_norms(b)
    nonzero = bnorm > 0
    tau = config.tau
    stop_tau = STOP_MARGIN * tau
    nu1, nu2 = config.smoothing_steps
    res = np.zeros(ncols)
    fallback_count = 0

    active = np.nonzero(nonzero)[0]
    if active.size:
        safe_norm = np.where(nonzero, bnorm, 1.0)
        stagnant = np.zeros(ncols, dtype=np.int64)
        prev = np.full(ncols, np.inf)
        needs_fallback: list[int] = []
        for _ in range(config.max_cycles):
            r = b[:, active] - matrix @ x[:, active]
            res[active] = _column_norms(r) / safe_norm[active]
            factor = res[active] / prev[active]
            stagnant[active] = np.where(
                factor > STAGNATION_FACTOR, stagnant[active] + 1, 0
            )
            prev[active] = res[active]
            conv = res[active] <= stop_tau
            stuck = stagnant[active] >= STAGNATION_CYCLES
            needs_fallback.extend(active[stuck & ~conv].tolist())
            keep = ~conv & ~stuck
            active = active[keep]
            if active.size == 0:
                break
            x[:, active] += _cycle(levels, 0, _center(r[:, keep]), nu1, nu2)
            x[:, active] = _center(x[:, active])
        else:
            r = b[:, active] - matrix @ x[:, active]
            res[active] = _column_norms(r) / safe_norm[active]
            conv = res[active] <= stop_tau
            needs_fallback.extend(active[~conv].tolist())
            active = active[:0]

        if needs_fallback:
            cols = np.asarray(sorted(needs_fallback), dtype=np.int64)
            fallback_count = cols.size
            xf, rf = _fcg(
                levels,
                x[:, cols].copy(),
                b[:, cols],
                bnorm[cols],
                stop_tau,
                nu1,
                nu2,
                FCG_MAX_ITERS,
            )
            x[:, cols] = xf
            res[cols] = rf
            still = cols[rf > stop_tau]
            if still.size:
                cg_iters = max(2000, int(50 * np.sqrt(n)))
                xg, rg = _jacobi_pcg(
                    matrix, x[:, still].copy(), b[:, still], bnorm[still],
                    stop_tau, cg_iters,
                )
                x[:, still] = xg
                res[still] = rg
            if (res[cols] > tau).any():
                raise ConvergenceError(
                    f"{int((res[cols] > tau).sum())} solve(s) failed to reach "
                    f"tau={tau:g}",
                    best_residual=float(res[cols].max()),
                )

    x = _center(x)
    res = np.where(nonzero, _column_norms(b - matrix @ x) / np.where(nonzero, bnorm, 1.0), 0.0)
    hierarchy.stats.record(res, fallback_count)
    return x, res


def solve(
    hierarchy: MultigridHierarchy,
    b: Sequence[float] | np.ndarray,
    config: SolverConfig | None = None,
) -> PotentialVector:
    """Solve one Laplacian system to the configured relative residual.

    The supply must be balanced (column sum zero within ``1e-10`` of its
    1-norm).  The returned potential is mean-centered; its residual is
    recomputed from the matrix, not taken from iteration bookkeeping.
    """
    config = config or hierarchy.config
    column = np.asarray(b, dtype=np.float64).reshape(-1, 1)
    x, res = _solve_block(hierarchy, column, config)
    return PotentialVector(values=x[:, 0], achieved_residual=float(res[0]))


def solve_many(
    hierarchy: MultigridHierarchy,
    supplies: Sequence[Sequence[float]] | np.ndarray,
    config: SolverConfig | None = None,
    threads: int = 1,
) -> list[PotentialVector]:
    """Solve many systems over one hierarchy; results are independent of
    execution order and of ``threads``.

    ``supplies`` holds one right-hand side per row (or a 2-D array of
    such rows).  Columns are processed in fixed-size blocks so the
    numerical result never depends on the worker count.
    """
    config = config or hierarchy.config
    stacked = np.asarray(supplies, dtype=np.float64)
    if stacked.ndim == 1:
        stacked = stacked.reshape(1, -1)
    count = stacked.shape[0]
    out_values = np.zeros((count, hierarchy.n))
    out_res = np.zeros(count)
    blocks = [
        (start, min(start + BLOCK_COLUMNS, count))
        for start in range(0, count, BLOCK_COLUMNS)
    ]

    def run(bounds: tuple[int, int]) -> None:
        lo, hi = bounds
        x, res = _solve_block(hierarchy, stacked[lo:hi].T, config)
        out_values[lo:hi] = x.T
        out_res[lo:hi] = res

    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, blocks))
    else:
        for bounds in blocks:
            run(bounds)
    return [
        PotentialVector(values=out_values[i], achieved_residual=float(out_res[i]))
        for i in range(count)
    ]
