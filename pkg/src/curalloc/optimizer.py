"""Projected gradient descent for the capacitated soft-assignment program.

The feasible set fixes every row of the N x M assignment matrix to a scaled
simplex (nonnegative, summing to the building's wall capacity). The
objective is the cost inner product plus a quadratic penalty on per-object
usage and, optionally, a proximal penalty toward an existing assignment.
Each iteration takes one gradient step and projects every row back exactly
by the sort-and-threshold rule.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional, Union

import numpy as np

from .cost import CostMatrix

ArrayLike = Union[np.ndarray, CostMatrix]

FEASIBILITY_MIN = -1e-15
FEASIBILITY_ROW_TOL = 1e-9


@dataclass(frozen=True)
class AssignmentMatrix:
    """Nonnegative N x M matrix whose row n sums to that location's capacity."""

    entries: np.ndarray
    row_capacities: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        caps = np.asarray(self.row_capacities, dtype=float)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "row_capacities", caps)
        if entries.ndim != 2 or caps.shape != (entries.shape[0],):
            raise ValueError("assignment shape mismatch")
        if entries.min(initial=0.0) < FEASIBILITY_MIN:
            raise ValueError("negative assignment entries")
        residual = np.abs(entries.sum(axis=1) - caps)
        if residual.size and residual.max() > FEASIBILITY_ROW_TOL:
            raise ValueError(
                f"row sums deviate from capacities by {residual.max():.3e}"
            )

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


@dataclass
class HyperParams:
    """Solver hyperparameters, with the scaled weights lam = lam_s * lam_bar etc."""

    alpha: float = 1.0
    beta: float = 100.0
    lambda_bar: float = 1.0
    tau_bar: float = 1.0
    lambda_scale: float = 1.0
    tau_scale: float = 1.0
    step_mode: str = "fixed"
    max_iters: int = 1000
    r_scaling: int = 50

    def __post_init__(self):
        if not (1.0 <= self.lambda_bar <= 10000.0):
            raise ValueError("lambda_bar must lie in [1, 10000]")
        if not (0.0 <= self.tau_bar <= 10000.0):
            raise ValueError("tau_bar must lie in [0, 10000]")
        if self.lambda_scale < 0 or self.tau_scale < 0:
            raise ValueError("scale factors must be nonnegative")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.r_scaling < 1:
            raise ValueError("r_scaling must be >= 1")
        if self.step_mode not in ("fixed", "theoretical"):
            raise ValueError(f"unknown step mode {self.step_mode!r}")

    @property
    def lam(self) -> float:
        return self.lambda_scale * self.lambda_bar

    @property
    def tau(self) -> float:
        return self.tau_scale * self.tau_bar


@dataclass
class SolveReport:
    final: AssignmentMatrix
    objective_trace: np.ndarray
    f1: float
    f2: float
    f3: float
    iterations_run: int
    capacity_residual: float
    initialization: str
    step_size: float
    hyper: Optional[HyperParams] = None

    def to_dict(self) -> dict:
        out = {
            "objective_trace": [float(v) for v in self.objective_trace],
            "f1": self.f1,
            "f2": self.f2,
            "f3": self.f3,
            "iterations_run": self.iterations_run,
            "capacity_residual": self.capacity_residual,
            "initialization": self.initialization,
            "step_size": self.step_size,
        }
        if self.hyper is not None:
            out["hyperparams"] = {
                "alpha": self.hyper.alpha,
                "beta": self.hyper.beta,
                "lambda_bar": self.hyper.lambda_bar,
                "tau_bar": self.hyper.tau_bar,
                "lambda_scale": self.hyper.lambda_scale,
                "tau_scale": self.hyper.tau_scale,
                "lambda": self.hyper.lam,
                "tau": self.hyper.tau,
                "step_mode": self.hyper.step_mode,
                "max_iters": self.hyper.max_iters,
            }
        return out


def _as_array(matrix: ArrayLike) -> np.ndarray:
    if isinstance(matrix, CostMatrix):
        return matrix.entries
    return np.asarray(matrix, dtype=float)


def _check_shapes(P, C, k, P_current):
    if P.shape != C.shape:
        raise ValueError(f"P {P.shape} and C {C.shape} differ in shape")
    if k.shape != (P.shape[1],):
        raise ValueError("object-capacity vector length mismatch")
    if P_current is not None and P_current.shape != P.shape:
        raise ValueError("prior assignment shape mismatch")


def objective_terms(
    P: np.ndarray,
    C: np.ndarray,
    k: np.ndarray,
    P_current: Optional[np.ndarray] = None,
) -> tuple[float, float, float]:
    """The three unweighted terms: cost inner product, usage penalty, prior penalty."""
    f1 = float(np.sum(C * P))
    col_err = P.sum(axis=0) - k
    f2 = float(col_err @ col_err)
    if P_current is None:
        f3 = 0.0
    else:
        diff = P - P_current
        f3 = float(np.sum(diff * diff))
    return f1, f2, f3


def objective(
    P: ArrayLike,
    C: ArrayLike,
    k: np.ndarray,
    lam: float,
    tau: Union[float, np.ndarray],
    P_current: Optional[np.ndarray] = None,
) -> float:
    """trace(C'P) + lam/2 ||P'1 - k||^2 + tau/2 ||P - P_current||^2_F.

    `tau` may be an N x M weight matrix for entry-wise proximal strength
    (used by curatorial locks); a scalar recovers the uniform penalty.
    """
    P, C = _as_array(P), _as_array(C)
    k = np.asarray(k, dtype=float)
    _check_shapes(P, C, k, P_current)
    f1 = float(np.sum(C * P))
    col_err = P.sum(axis=0) - k
    value = f1 + 0.5 * lam * float(col_err @ col_err)
    if P_current is not None:
        diff = P - P_current
        value += 0.5 * float(np.sum(tau * diff * diff))
    return value


def gradient(
    P: ArrayLike,
    C: ArrayLike,
    k: np.ndarray,
    lam: float,
    tau: Union[float, np.ndarray],
    P_current: Optional[np.ndarray] = None,
) -> np.ndarray:
    """C + lam * 1(1'P - k') + tau * (P - P_current); the lam term is constant down columns."""
    P, C = _as_array(P), _as_array(C)
    k = np.asarray(k, dtype=float)
    _check_shapes(P, C, k, P_current)
    grad = C + lam * (P.sum(axis=0) - k)[None, :]
    if P_current is not None:
        grad = grad + tau * (P - P_current)
    return grad


def project_row(u: np.ndarray, h: float) -> np.ndarray:
    """Euclidean projection of a row onto {x >= 0, sum(x) = h}.

    Sort descending, find the largest prefix whose running threshold stays
    below its last entry, subtract that threshold, clip at zero.
    """
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or u.size == 0:
        raise ValueError("expected a nonempty 1-D vector")
    if h <= 0:
        raise ValueError("row capacity must be positive")
    return project_rows(u[None, :], np.array([h]))[0]


def project_rows(U: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Row-wise simplex projection, vectorized across rows."""
    U = np.asarray(U, dtype=float)
    h = np.asarray(h, dtype=float)
    if U.ndim != 2 or U.shape[1] == 0:
        raise ValueError("expected a nonempty 2-D matrix")
    if (h <= 0).any():
        raise ValueError("row capacity must be positive")
    n_rows, n_cols = U.shape
    sorted_desc = -np.sort(-U, axis=1)
    running = np.cumsum(sorted_desc, axis=1)
    ranks = np.arange(1, n_cols + 1)
    keep = (running - h[:, None]) / ranks < sorted_desc
    # the first column always satisfies the condition for h > 0
    last_kept = np.where(keep, np.arange(n_cols), -1).max(axis=1)
    theta = (running[np.arange(n_rows), last_kept] - h) / (last_kept + 1)
    return np.maximum(U - theta[:, None], 0.0)


def init_uniform(h: np.ndarray, n_objects: int) -> AssignmentMatrix:
    """Every object equally weighted in every row."""
    h = np.asarray(h, dtype=float)
    if n_objects < 1:
        raise ValueError("need at least one object")
    entries = np.repeat(h[:, None] / n_objects, n_objects, axis=1)
    return AssignmentMatrix(entries=entries, row_capacities=h)


def init_random(h: np.ndarray, n_objects: int, seed: int) -> AssignmentMatrix:
    """Rows drawn uniformly from their scaled simplexes (exponential spacings)."""
    h = np.asarray(h, dtype=float)
    if n_objects < 1:
        raise ValueError("need at least one object")
    rng = np.random.default_rng(seed)
    gaps = rng.exponential(size=(len(h), n_objects))
    entries = gaps / gaps.sum(axis=1, keepdims=True) * h[:, None]
    return AssignmentMatrix(entries=entries, row_capacities=h)


def scale_hyperparams(
    C: ArrayLike,
    h: np.ndarray,
    k: np.ndarray,
    P_current: Optional[np.ndarray] = None,
    r: int = 50,
    seed: int = 0,
) -> tuple[float, float]:
    """Mean per-sample quotients of the cost term by each penalty term.

    Sampling r feasible matrices uniformly, the scale factors average
    f1(i)/f2(i) and f1(i)/f3(i), so that lam_bar = tau_bar = 1 weighs each
    penalty at roughly the cost term's own magnitude. With no prior matrix
    the prior factor is 0.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    C = _as_array(C)
    h = np.asarray(h, dtype=float)
    k = np.asarray(k, dtype=float)
    lam_sum = 0.0
    tau_sum = 0.0
    for i in range(r):
        P = init_random(h, C.shape[1], seed + i).entries
        f1, f2, f3 = objective_terms(P, C, k, P_current)
        if f1 == 0.0 or f2 == 0.0 or (P_current is not None and f3 == 0.0):
            raise ValueError("degenerate scaling: a sampled term vanished")
        lam_sum += f1 / f2
        tau_sum += 0.0 if P_current is None else f1 / f3
    return lam_sum / r, tau_sum / r


def lipschitz_step(
    lam: float, tau: float, n_locations: int, mode: str = "fixed"
) -> float:
    """Step size: the fixed 1/(2N) recipe, or 1/(lam*N + tau) from the
    gradient's linear part in theoretical mode (falling back when degenerate)."""
    if n_locations < 1:
        raise ValueError("need at least one location")
    if mode == "fixed":
        return 1.0 / (2 * n_locations)
    if mode == "theoretical":
        lipschitz = lam * n_locations + tau
        if lipschitz <= 0:
            return 1.0 / (2 * n_locations)
        return 1.0 / lipschitz
    raise ValueError(f"unknown step mode {mode!r}")


def solve(
    C: ArrayLike,
    h: np.ndarray,
    k: np.ndarray,
    hyper: HyperParams,
    init: AssignmentMatrix,
    P_current: Optional[np.ndarray] = None,
    tau_weights: Optional[np.ndarray] = None,
    initialization: str = "custom",
    progress: Optional[Callable[[int, float], None]] = None,
    early_stop: bool = False,
    step_size: Optional[float] = None,
) -> SolveReport:
    """Run projected gradient descent and report the feasible minimizer.

    `tau_weights`, when given, replaces the scalar prior weight with an
    entry-wise matrix (curatorial locks); the scalar tau from `hyper` is
    ignored in that case. Every iterate is checked feasible; a non-finite
    iterate aborts with its iteration index.
    """
    C = _as_array(C)
    h = np.asarray(h, dtype=float)
    k = np.asarray(k, dtype=float)
    row_sums = C.sum(axis=1)
    if np.abs(row_sums - 1.0).max() > 1e-6:
        raise ValueError("cost matrix must be row-stochastic")
    if init.shape != C.shape or not np.allclose(init.row_capacities, h):
        raise ValueError("infeasible initialization")

    lam = hyper.lam
    if P_current is None:
        tau: Union[float, np.ndarray] = 0.0
        tau_max = 0.0
    elif tau_weights is not None:
        tau = np.asarray(tau_weights, dtype=float)
        if tau.shape != C.shape:
            raise ValueError("tau weight matrix shape mismatch")
        tau_max = float(tau.max())
    else:
        tau = hyper.tau
        tau_max = hyper.tau
    if step_size is None:
        step_size = lipschitz_step(lam, tau_max, C.shape[0], hyper.step_mode)
        # the fixed 1/(2N) recipe diverges once the quadratic part is stiff
        # enough that eps * L >= 2; fall back to the Lipschitz-derived step
        lipschitz = lam * C.shape[0] + tau_max
        if step_size * lipschitz >= 2.0:
            step_size = 1.0 / lipschitz

    P = init.entries.copy()
    trace = np.empty(hyper.max_iters)
    iterations = 0
    flat_streak = 0
    for it in range(hyper.max_iters):
        grad = gradient(P, C, k, lam, tau, P_current)
        P = project_rows(P - step_size * grad, h)
        if not np.isfinite(P).all():
            raise FloatingPointError(f"non-finite iterate at iteration {it + 1}")
        _check_feasible(P, h, it + 1)
        value = objective(P, C, k, lam, tau, P_current)
        trace[it] = value
        iterations = it + 1
        if progress is not None and (it % 10 == 0 or it == hyper.max_iters - 1):
            progress(iterations, value)
        if early_stop and it > 0:
            flat_streak = flat_streak + 1 if abs(trace[it] - trace[it - 1]) < 1e-12 else 0
            if flat_streak >= 20:
                break

    f1, f2, f3 = objective_terms(P, C, k, P_current)
    residual = float(np.linalg.norm(P.sum(axis=0) - k))
    return SolveReport(
        final=AssignmentMatrix(entries=P, row_capacities=h),
        objective_trace=trace[:iterations].copy(),
        f1=f1,
        f2=f2,
        f3=f3,
        iterations_run=iterations,
        capacity_residual=residual,
        initialization=initialization,
        step_size=step_size,
        hyper=replace(hyper),
    )


def _check_feasible(P: np.ndarray, h: np.ndarray, iteration: int) -> None:
    if P.min() < FEASIBILITY_MIN:
        raise FloatingPointError(
            f"negative entry {P.min():.3e} at iteration {iteration}"
        )
    residual = np.abs(P.sum(axis=1) - h).max()
    if residual > FEASIBILITY_ROW_TOL:
        raise FloatingPointError(
            f"row-sum residual {residual:.3e} at iteration {iteration}"
        )
