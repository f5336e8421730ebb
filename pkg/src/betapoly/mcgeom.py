"""Monte Carlo ground truth for beta polytopes.

Sampling: a point of the beta law in B^d is a uniform direction times a
radius r with r^2 ~ Beta(d/2, beta + 1); beta = -1 puts r = 1 exactly.

Membership of a query in conv(X_1, ..., X_n) is a linear feasibility
question (lambda >= 0, sum lambda = 1, sum lambda_i X_i = query), answered
by :func:`contains` with an in-repo phase-one simplex. The estimators run the
same test in bulk; for small dimensions they may instead use qhull facets
(``engine="facets"``) or barycentric coordinates when the hull is a simplex
(``engine="simplex"``), which agree with the linear program up to the
feasibility tolerance and are much faster per probe.

Trials are split into fixed chunks; chunk ``i`` draws from
``SeedSequence(seed, spawn_key=(i,))`` so results do not depend on how many
workers run the chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Optional

import numpy as np
from scipy.spatial import ConvexHull
from scipy.spatial import QhullError

from .exactvol import BetaModel
from .logreal import log_binomial, log_sum

__all__ = [
    "PointCloud",
    "Estimate",
    "SolverError",
    "sample_beta",
    "sample_ball",
    "feasible_convex_combination",
    "contains",
    "mc_volume_ratio",
    "mc_vertex_count",
    "wendel_probability",
    "wendel_identity",
    "mc_origin_containment",
]

FEAS_TOL = 1e-9
DEFAULT_CHUNK = 500
# qhull facets beat the LP comfortably up to this dimension
FACET_MAX_D = 8


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray
    model: BetaModel
    seed: int

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.model.d:
            raise ValueError("points must be an n x d array")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class Estimate:
    value: float
    std_error: float
    trials: int
    seed: int

    def z_score(self, reference: float, reference_error: float = 0.0) -> float:
        se = math.hypot(self.std_error, reference_error)
        if se == 0.0:
            return 0.0 if self.value == reference else math.copysign(math.inf, self.value - reference)
        return (self.value - reference) / se

    def as_dict(self) -> dict:
        return {"value": self.value, "std_error": self.std_error, "trials": self.trials, "seed": self.seed}


# sampling ----------------------------------------------------------------------


def _directions(rng, shape, d):
    g = rng.standard_normal(shape + (d,))
    return g / np.linalg.norm(g, axis=-1, keepdims=True)


def _beta_points(rng, d, beta, shape):
    u = _directions(rng, shape, d)
    if beta == -1.0:
        return u
    r = np.sqrt(rng.beta(0.5 * d, beta + 1.0, size=shape))
    return u * r[..., None]


def sample_ball(rng, shape, d):
    """Uniform points in B^d: uniform direction times U^(1/d)."""
    u = _directions(rng, shape, d)
    r = rng.random(shape) ** (1.0 / d)
    return u * r[..., None]


def sample_beta(model: BetaModel, n: int, seed: int) -> PointCloud:
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    return PointCloud(_beta_points(rng, model.d, model.beta, (n,)), model, seed)


# linear feasibility --------------------------------------------------------------


def feasible_convex_combination(points, query, tol=FEAS_TOL, max_iter=None):
    """Phase-one simplex for lambda >= 0, sum(lambda) = 1, points.T @ lambda = query.

    Returns the weights when feasible and None otherwise. The upper bounds
    lambda <= 1 follow from the sum constraint and are not carried
    explicitly. Bland's rule prevents cycling. Raises :class:`SolverError` if
    the iteration cap is hit or the final certificate is inconsistent.
    """
    X = np.asarray(points, dtype=float)
    qv = np.asarray(query, dtype=float)
    n, d = X.shape
    m = d + 1
    A = np.vstack([X.T, np.ones((1, n))])
    b = np.concatenate([qv, [1.0]])
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0
    # tableau: [A | I | b], artificial variables n..n+m-1
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -A.sum(axis=0)
    T[m, -1] = -b.sum()
    basis = list(range(n, n + m))
    scale = max(1.0, float(np.abs(X).max(initial=0.0)), float(np.abs(qv).max(initial=0.0)))
    piv_tol = 1e-12 * scale
    cap = max_iter or 50 * (n + m)
    for _ in range(cap):
        rc = T[m, :n + m]
        cand = np.nonzero(rc < -piv_tol)[0]
        if cand.size == 0:
            break
        j = int(cand[0])
        col = T[:m, j]
        pos = col > piv_tol
        if not np.any(pos):
            raise SolverError("phase-one objective unbounded; impossible for a feasibility problem")
        ratios = np.full(m, np.inf)
        ratios[pos] = T[:m, -1][pos] / col[pos]
        best = ratios.min()
        ties = np.nonzero(ratios <= best + 1e-15 * max(1.0, abs(best)))[0]
        r = int(min(ties, key=lambda i: basis[i]))
        T[r] /= T[r, j]
        others = np.arange(m + 1) != r
        T[others] -= np.outer(T[others, j], T[r])
        basis[r] = j
    else:
        raise SolverError(f"simplex exceeded {cap} iterations")
    infeas = -T[m, -1]
    lam = np.zeros(n)
    for i, var in enumerate(basis):
        if var < n:
            lam[var] = T[i, -1]
    if infeas > tol * scale:
        return None
    lam = np.maximum(lam, 0.0)
    resid = np.abs(A @ lam - b).max()
    if resid > 10 * tol * scale:
        raise SolverError(f"phase-one optimum {infeas:.3g} but residual {resid:.3g}")
    return lam


def contains(cloud, query, tol=FEAS_TOL) -> bool:
    """True iff ``query`` lies in the convex hull of the cloud (linear feasibility)."""
    pts = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud, dtype=float)
    if pts.shape[0] == 0:
        raise ValueError("empty point cloud")
    return feasible_convex_combination(pts, query, tol) is not None


# bulk membership engines ----------------------------------------------------------


def _resolve_engine(engine, d):
    if engine == "auto":
        return "facets" if d <= FACET_MAX_D else "lp"
    if engine not in ("lp", "facets", "simplex"):
        raise ValueError(f"unknown engine {engine!r}")
    return engine


def _inside_lp(points, queries, tol):
    return np.array([feasible_convex_combination(points, q, tol) is not None for q in queries])


def _inside_facets(points, queries, tol):
    try:
        hull = ConvexHull(points)
    except QhullError:
        return _inside_lp(points, queries, tol)
    eq = hull.equations
    return (queries @ eq[:, :-1].T + eq[:, -1]).max(axis=1) <= tol


def _inside_simplices(vertices, queries, tol):
    """Barycentric test for a batch of simplices.

    vertices: (T, d+1, d); queries: (T, P, d). Returns (T, P) booleans.
    """
    v0 = vertices[:, :1, :]
    M = np.swapaxes(vertices[:, 1:, :] - v0, 1, 2)  # (T, d, d)
    rhs = np.swapaxes(queries - v0, 1, 2)  # (T, d, P)
    lam = np.linalg.solve(M, rhs)  # (T, d, P)
    lam0 = 1.0 - lam.sum(axis=1)
    return (lam.min(axis=1) >= -tol) & (lam0 >= -tol)


# estimators -----------------------------------------------------------------------


def _chunk_rng(seed, index):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _chunks(trials, chunk_size):
    sizes = [chunk_size] * (trials // chunk_size)
    if trials % chunk_size:
        sizes.append(trials % chunk_size)
    return sizes


def _run_chunks(fn, trials, seed, chunk_size, workers):
    sizes = _chunks(trials, chunk_size)
    tasks = [(seed, i, s) for i, s in enumerate(sizes)]
    if workers and workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(fn, tasks))
    else:
        parts = [fn(t) for t in tasks]
    return np.concatenate(parts) if parts else np.zeros(0)


def _mean_se(samples):
    t = len(samples)
    mean = float(samples.mean())
    se = float(samples.std(ddof=1) / math.sqrt(t)) if t > 1 else 0.0
    return mean, se


def _volume_chunk(task, d, beta, n, probes, engine, tol):
    seed, index, size = task
    rng = _chunk_rng(seed, index)
    X = _beta_points(rng, d, beta, (size, n))
    Q = sample_ball(rng, (size, probes), d)
    if engine == "simplex":
        return _inside_simplices(X, Q, tol).mean(axis=1)
    test = _inside_facets if engine == "facets" else _inside_lp
    return np.array([test(X[t], Q[t], tol).mean() for t in range(size)])


def mc_volume_ratio(model: BetaModel, n: int, polytope_trials: int, probe_trials: int, seed: int,
                    engine: str = "auto", chunk_size: int = DEFAULT_CHUNK,
                    workers: Optional[int] = None, tol: float = FEAS_TOL) -> Estimate:
    """Hit-or-miss estimate of E vol_d(P^beta_{n,d}) / kappa_d.

    Each hull gets its own ``probe_trials`` uniform probes; the standard
    error is the between-hull spread of the hit fractions, which includes
    the binomial probe noise.
    """
    if n < model.d + 1:
        raise ValueError("need n >= d + 1")
    if engine == "auto" and n == model.d + 1:
        engine = "simplex"
    engine = _resolve_engine(engine, model.d)
    if engine == "simplex" and n != model.d + 1:
        raise ValueError("simplex engine needs n = d + 1")
    fn = partial(_volume_chunk, d=model.d, beta=model.beta, n=n, probes=probe_trials,
                 engine=engine, tol=tol)
    fractions = _run_chunks(fn, polytope_trials, seed, chunk_size, workers)
    mean, se = _mean_se(fractions)
    if polytope_trials == 1:
        se = math.sqrt(mean * (1 - mean) / probe_trials)
    return Estimate(mean, se, polytope_trials, seed)


def _vertex_chunk(task, d, beta, n, engine, tol):
    seed, index, size = task
    rng = _chunk_rng(seed, index)
    X = _beta_points(rng, d, beta, (size, n))
    out = np.empty(size)
    for t in range(size):
        if engine == "facets":
            try:
                out[t] = len(ConvexHull(X[t]).vertices)
                continue
            except QhullError:
                pass
        idx = np.arange(n)
        out[t] = sum(
            feasible_convex_combination(X[t][idx != j], X[t][j], tol) is None for j in range(n)
        )
    return out


def mc_vertex_count(model: BetaModel, n: int, trials: int, seed: int, engine: str = "auto",
                    chunk_size: int = DEFAULT_CHUNK, workers: Optional[int] = None,
                    tol: float = FEAS_TOL) -> Estimate:
    """Estimate E f_0 by counting points outside the hull of the others (beta = 0 only)."""
    if model.beta != 0.0:
        raise ValueError("vertex-count estimator is restricted to beta = 0")
    if n < model.d + 1:
        raise ValueError("need n >= d + 1")
    engine = _resolve_engine(engine, model.d)
    if engine == "simplex":
        raise ValueError("simplex engine does not apply to vertex counts")
    fn = partial(_vertex_chunk, d=model.d, beta=model.beta, n=n, engine=engine, tol=tol)
    counts = _run_chunks(fn, trials, seed, chunk_size, workers)
    mean, se = _mean_se(counts)
    return Estimate(mean, se, trials, seed)


def wendel_probability(n: int, d: int) -> float:
    """2^-(n-1) * sum_{k=d}^{n-1} C(n-1, k): P(Binomial(n-1, 1/2) >= d)."""
    if not n > d >= 1:
        raise ValueError("need n > d >= 1")
    terms = [log_binomial(n - 1, k) for k in range(d, n)]
    return math.exp(log_sum(terms) - (n - 1) * math.log(2.0))


def wendel_identity(n: int, d: int) -> float:
    """P(0 in hull) for n symmetric absolutely continuous points: 1 - 2^-(n-1) sum_{k<d} C(n-1, k)."""
    if not n > d >= 1:
        raise ValueError("need n > d >= 1")
    terms = [log_binomial(n - 1, k) for k in range(d)]
    return -math.expm1(log_sum(terms) - (n - 1) * math.log(2.0))


def _origin_chunk(task, d, beta, n, engine, tol):
    seed, index, size = task
    rng = _chunk_rng(seed, index)
    X = _beta_points(rng, d, beta, (size, n))
    origin = np.zeros((1, d))
    if engine == "simplex":
        return _inside_simplices(X, np.zeros((size, 1, d)), tol)[:, 0].astype(float)
    test = _inside_facets if engine == "facets" else _inside_lp
    return np.array([float(test(X[t], origin, tol)[0]) for t in range(size)])


def mc_origin_containment(model: BetaModel, n: int, trials: int, seed: int, engine: str = "auto",
                          chunk_size: int = DEFAULT_CHUNK, workers: Optional[int] = None,
                          tol: float = FEAS_TOL) -> Estimate:
    """Fraction of trials whose hull contains the origin."""
    if n <= model.d:
        raise ValueError("need n > d")
    if engine == "auto" and n == model.d + 1:
        engine = "simplex"
    engine = _resolve_engine(engine, model.d)
    fn = partial(_origin_chunk, d=model.d, beta=model.beta, n=n, engine=engine, tol=tol)
    hits = _run_chunks(fn, trials, seed, chunk_size, workers)
    mean, se = _mean_se(hits)
    return Estimate(mean, se, trials, seed)
