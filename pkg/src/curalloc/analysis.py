"""How families of optimized assignments relate: similarity, embedding, sweeps.

Optimal assignment matrices obtained under different hyperparameters are
compared through inverse entry-wise l1 distances, embedded into the plane
with a symmetric-normalized spectral construction, and swept over
hyperparameter grids to map how the fairness gap responds.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from . import cost as cost_mod
from . import fairness as fairness_mod
from . import optimizer as opt
from .attributes import AttributeVector
from .optimizer import AssignmentMatrix, HyperParams
from .population import Location, OccupancyAssignment, User

DEFAULT_SIMILARITY_CAP = 1e12


@dataclass
class SolutionFamily:
    """Assignment matrices labelled by the (beta, lambda_bar, tau_bar) that produced them."""

    matrices: list[Union[AssignmentMatrix, np.ndarray]]
    labels: list[tuple[float, float, float]]

    def __post_init__(self):
        if len(self.matrices) != len(self.labels):
            raise ValueError("one label per matrix required")
        shapes = {self._entries(i).shape for i in range(len(self.matrices))}
        if len(shapes) > 1:
            raise ValueError("family matrices differ in shape")

    def _entries(self, i: int) -> np.ndarray:
        m = self.matrices[i]
        return m.entries if isinstance(m, AssignmentMatrix) else np.asarray(m)

    def __len__(self) -> int:
        return len(self.matrices)


def similarity(
    family: SolutionFamily, cap: float = DEFAULT_SIMILARITY_CAP
) -> np.ndarray:
    """Symmetric inverse-l1 similarity with zero diagonal; identical pairs capped."""
    r = len(family)
    if r < 2:
        raise ValueError("need at least two matrices")
    if cap <= 0:
        raise ValueError("cap must be positive")
    W = np.zeros((r, r))
    for i in range(r):
        for j in range(i + 1, r):
            dist = float(np.abs(family._entries(i) - family._entries(j)).sum())
            w = cap if dist == 0.0 else min(1.0 / dist, cap)
            W[i, j] = W[j, i] = w
    return W


def spectral_embed(W: np.ndarray, dim: int = 2) -> np.ndarray:
    """Symmetric-normalized spectral embedding with unit-norm rows.

    Eigenvectors of D^{-1/2} W D^{-1/2} for the `dim` largest eigenvalues,
    rows scaled to unit length, each column's sign fixed so its
    largest-magnitude entry is positive.
    """
    W = np.asarray(W, dtype=float)
    r = W.shape[0]
    if W.shape != (r, r):
        raise ValueError("similarity matrix must be square")
    if not np.allclose(W, W.T, atol=1e-12):
        raise ValueError("similarity matrix must be symmetric")
    if dim >= r:
        raise ValueError("embedding dimension must be below the family size")
    degrees = W.sum(axis=1)
    isolated = np.where(degrees == 0)[0]
    if isolated.size:
        raise ValueError(f"isolated point at index {int(isolated[0])}")
    inv_sqrt = 1.0 / np.sqrt(degrees)
    lap = inv_sqrt[:, None] * W * inv_sqrt[None, :]
    eigvals, eigvecs = np.linalg.eigh(lap)
    coords = eigvecs[:, np.argsort(eigvals)[::-1][:dim]]
    norms = np.linalg.norm(coords, axis=1, keepdims=True)
    coords = coords / np.where(norms == 0, 1.0, norms)
    for j in range(dim):
        lead = np.argmax(np.abs(coords[:, j]))
        if coords[lead, j] < 0:
            coords[:, j] = -coords[:, j]
    return coords


@dataclass
class SweepCell:
    beta: float
    lambda_bar: float
    tau_bar: float
    ok: bool
    gaps: dict[str, float] = field(default_factory=dict)
    capacity_residual: float = float("nan")
    baseline_l1: float = float("nan")
    error: str = ""
    assignment: Optional[AssignmentMatrix] = None


@dataclass
class SweepProblem:
    """Everything a sweep cell needs: the instance, its occupancies, and defaults."""

    locations: Sequence[Location]
    users: Sequence[User]
    collection: Sequence[AttributeVector]
    h: np.ndarray
    k: np.ndarray
    cost_occupancy: OccupancyAssignment
    fairness_rounds: Sequence[OccupancyAssignment]
    P_current: np.ndarray
    base_hyper: HyperParams = field(default_factory=HyperParams)
    scaling_seed: int = 0


def sweep_grid(
    problem: SweepProblem,
    betas: Sequence[float],
    lambda_bars: Sequence[float],
    tau_bars: Sequence[float],
    groups: Sequence[fairness_mod.GroupSpec],
) -> list[SweepCell]:
    """Solve the prior-regularized program per hyperparameter tuple and score
    each group's exposure gap; failed cells are kept, marked invalid."""
    if not (betas and lambda_bars and tau_bars):
        raise ValueError("parameter lists must be nonempty")
    cells: list[SweepCell] = []
    for beta in betas:
        C = cost_mod.build_cost_matrix(
            problem.locations,
            problem.cost_occupancy,
            problem.users,
            problem.collection,
            alpha=problem.base_hyper.alpha,
            beta=beta,
        )
        lam_s, tau_s = opt.scale_hyperparams(
            C,
            problem.h,
            problem.k,
            problem.P_current,
            r=problem.base_hyper.r_scaling,
            seed=problem.scaling_seed,
        )
        for lam_bar in lambda_bars:
            for tau_bar in tau_bars:
                cell = SweepCell(beta=beta, lambda_bar=lam_bar, tau_bar=tau_bar, ok=False)
                try:
                    hyper = replace(
                        problem.base_hyper,
                        beta=beta,
                        lambda_bar=lam_bar,
                        tau_bar=tau_bar,
                        lambda_scale=lam_s,
                        tau_scale=tau_s,
                    )
                    report = opt.solve(
                        C,
                        problem.h,
                        problem.k,
                        hyper,
                        opt.init_uniform(problem.h, C.shape[1]),
                        P_current=problem.P_current,
                        initialization="uniform",
                    )
                    table = fairness_mod.fairness_table(
                        {"solved": report.final},
                        problem.fairness_rounds,
                        problem.users,
                        problem.locations,
                        problem.collection,
                        groups,
                    )
                    cell.gaps = {
                        g.name: table["solved"][g.name].mean_gap for g in groups
                    }
                    cell.capacity_residual = report.capacity_residual
                    cell.baseline_l1 = float(
                        np.abs(report.final.entries - problem.P_current).sum()
                    )
                    cell.assignment = report.final
                    cell.ok = True
                except (ValueError, FloatingPointError) as exc:
                    cell.error = str(exc)
                cells.append(cell)
    return cells


def grid_to_rows(cells: Sequence[SweepCell]) -> list[dict]:
    """Flat records for CSV emission."""
    rows = []
    for c in cells:
        row = {
            "beta": c.beta,
            "lambda_bar": c.lambda_bar,
            "tau_bar": c.tau_bar,
            "ok": int(c.ok),
            "capacity_residual": c.capacity_residual,
            "baseline_l1": c.baseline_l1,
            "error": c.error,
        }
        for name, gap in c.gaps.items():
            row[f"gap[{name}]"] = gap
        rows.append(row)
    return rows


PLOT_SCRIPT = '''"""Render the embedding scatter and the gap-vs-parameter grid.

Reads the CSV artifacts written next to this script and saves PNG figures.
Run:  python plot_results.py
"""

import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def read_csv(name):
    path = os.path.join(HERE, name)
    if not os.path.exists(path):
        return []
    with open(path) as fh:
        return list(csv.DictReader(fh))


def plot_embedding():
    rows = read_csv("embedding.csv")
    if not rows:
        return
    xs = [float(r["x"]) for r in rows]
    ys = [float(r["y"]) for r in rows]
    taus = [float(r["tau_bar"]) for r in rows]
    fig, ax = plt.subplots(figsize=(6, 5))
    sc = ax.scatter(xs, ys, c=taus, cmap="coolwarm", s=60)
    fig.colorbar(sc, ax=ax, label="tau_bar")
    ax.set_xlabel("embedding x")
    ax.set_ylabel("embedding y")
    ax.set_title("Solution-family spectral embedding")
    fig.tight_layout()
    fig.savefig(os.path.join(HERE, "embedding.png"), dpi=150)


def plot_grid():
    rows = [r for r in read_csv("sweep.csv") if r["ok"] == "1"]
    if not rows:
        return
    gap_cols = [k for k in rows[0] if k.startswith("gap[")]
    betas = sorted({float(r["beta"]) for r in rows})
    lams = sorted({float(r["lambda_bar"]) for r in rows})
    fig, axes = plt.subplots(
        len(lams), len(betas), figsize=(4 * len(betas), 3 * len(lams)), squeeze=False
    )
    for i, lam in enumerate(lams):
        for j, beta in enumerate(betas):
            ax = axes[i][j]
            sub = [
                r
                for r in rows
                if float(r["beta"]) == beta and float(r["lambda_bar"]) == lam
            ]
            sub.sort(key=lambda r: float(r["tau_bar"]))
            taus = [float(r["tau_bar"]) for r in sub]
            for col in gap_cols:
                ax.plot(taus, [float(r[col]) for r in sub], marker="o", label=col)
            ax.axhline(0.0, color="gray", linestyle="--", linewidth=1)
            ax.set_xscale("symlog")
            ax.set_title(f"beta={beta:g}, lambda_bar={lam:g}", fontsize=9)
            ax.set_xlabel("tau_bar")
            ax.set_ylabel("gap")
    if gap_cols:
        axes[0][0].legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(os.path.join(HERE, "sweep.png"), dpi=150)


if __name__ == "__main__":
    plot_embedding()
    plot_grid()
    print("figures written next to this script")
'''


def write_plot_script(path) -> None:
    """Emit a self-contained matplotlib script for the CSV artifacts."""
    with open(path, "w") as fh:
        fh.write(PLOT_SCRIPT)
