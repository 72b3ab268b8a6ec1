import numpy as np
import pytest
from scipy.cluster.vq import kmeans2

from curalloc.analysis import (
    SolutionFamily,
    SweepProblem,
    grid_to_rows,
    similarity,
    spectral_embed,
    sweep_grid,
    write_plot_script,
)
from curalloc.fairness import GroupSpec
from curalloc.ingest import generate_synthetic
from curalloc.optimizer import HyperParams, init_random
from curalloc.population import resample


def family_of(matrices):
    return SolutionFamily(
        matrices=list(matrices), labels=[(1.0, 1.0, 1.0)] * len(matrices)
    )


class TestSimilarity:
    def test_identical_pair_capped(self):
        P = np.ones((2, 3))
        W = similarity(family_of([P, P.copy()]), cap=1e12)
        assert W[0, 1] == 1e12
        assert W[0, 0] == 0.0

    def test_direct_formula(self):
        A = np.zeros((2, 2))
        B = np.ones((2, 2))  # l1 distance 4
        W = similarity(family_of([A, B]))
        assert W[0, 1] == pytest.approx(0.25)

    def test_three_matrix_double_loop_oracle(self):
        rng = np.random.default_rng(0)
        mats = [rng.uniform(size=(3, 4)) for _ in range(3)]
        W = similarity(family_of(mats))
        for i in range(3):
            for j in range(3):
                if i == j:
                    assert W[i, j] == 0.0
                else:
                    want = 1.0 / np.abs(mats[i] - mats[j]).sum()
                    assert W[i, j] == pytest.approx(want, abs=1e-12)

    def test_symmetric_nonnegative(self):
        rng = np.random.default_rng(1)
        mats = [rng.uniform(size=(2, 5)) for _ in range(6)]
        W = similarity(family_of(mats), cap=100.0)
        assert (W == W.T).all()
        assert (np.diag(W) == 0).all()
        off = W[~np.eye(6, dtype=bool)]
        assert ((off > 0) & (off <= 100.0)).all()

    def test_needs_two(self):
        with pytest.raises(ValueError):
            similarity(family_of([np.ones((2, 2))]))


class TestSpectralEmbed:
    def test_two_duplicate_pairs_coincide(self):
        W = np.full((4, 4), 1e-6)
        np.fill_diagonal(W, 0.0)
        W[0, 1] = W[1, 0] = 5.0
        W[2, 3] = W[3, 2] = 5.0
        coords = spectral_embed(W, dim=2)
        assert np.abs(coords[0] - coords[1]).max() < 1e-6
        assert np.abs(coords[2] - coords[3]).max() < 1e-6
        assert np.linalg.norm(coords[0] - coords[2]) > 0.5

    def test_rows_unit_norm(self):
        rng = np.random.default_rng(2)
        A = rng.uniform(0.1, 2.0, size=(7, 7))
        W = (A + A.T) / 2
        np.fill_diagonal(W, 0.0)
        coords = spectral_embed(W, dim=2)
        assert np.abs(np.linalg.norm(coords, axis=1) - 1.0).max() < 1e-9

    def test_degenerate_all_equal_is_deterministic(self):
        # with an uninformative W the top eigenvector is constant while the
        # second axis is an arbitrary basis choice inside a degenerate
        # eigenspace; the output is still unit-norm and reproducible
        W = np.ones((5, 5)) - np.eye(5)
        coords = spectral_embed(W, dim=2)
        assert np.abs(np.linalg.norm(coords, axis=1) - 1.0).max() < 1e-9
        assert (spectral_embed(W, dim=2) == coords).all()

    def test_permutation_invariance(self):
        rng = np.random.default_rng(2)
        A = rng.uniform(0.1, 2.0, size=(7, 7))
        W = (A + A.T) / 2
        np.fill_diagonal(W, 0.0)
        coords = spectral_embed(W, dim=2)
        perm = rng.permutation(7)
        permuted = spectral_embed(W[np.ix_(perm, perm)], dim=2)
        assert np.abs(permuted - coords[perm]).max() < 1e-9

    def test_isolated_point_rejected(self):
        W = np.zeros((3, 3))
        W[0, 1] = W[1, 0] = 1.0
        with pytest.raises(ValueError, match="index 2"):
            spectral_embed(W, dim=1)

    def test_dim_bound(self):
        W = np.ones((3, 3)) - np.eye(3)
        with pytest.raises(ValueError):
            spectral_embed(W, dim=3)


@pytest.fixture(scope="module")
def sweep_problem():
    ds = generate_synthetic(n_objects=24, n_locations=6, n_users=240, skew=0.6, seed=4)
    rounds = resample(ds.users, ds.locations, 3, 7)
    return SweepProblem(
        locations=ds.locations,
        users=ds.users,
        collection=ds.collection_attributes,
        h=ds.location_capacities,
        k=ds.object_capacities,
        cost_occupancy=rounds[0],
        fairness_rounds=rounds,
        P_current=ds.current_assignment,
        base_hyper=HyperParams(step_mode="theoretical", max_iters=400),
        scaling_seed=0,
    ), ds


class TestSweepGrid:
    def test_single_cell(self, sweep_problem):
        problem, ds = sweep_problem
        groups = [GroupSpec(dimension="dim0", disadvantaged=frozenset({"d0c1"}))]
        cells = sweep_grid(problem, [100.0], [1.0], [1.0], groups)
        assert len(cells) == 1
        assert cells[0].ok
        assert groups[0].name in cells[0].gaps
        rows = grid_to_rows(cells)
        assert rows[0]["ok"] == 1

    def test_dominant_prior_locks_to_baseline(self, sweep_problem):
        problem, ds = sweep_problem
        groups = [GroupSpec(dimension="dim0", disadvantaged=frozenset({"d0c1"}))]
        cells = sweep_grid(problem, [100.0], [1.0], [1.0, 10000.0], groups)
        by_tau = {c.tau_bar: c for c in cells}
        assert by_tau[10000.0].baseline_l1 < 1e-3 * by_tau[1.0].baseline_l1

    def test_small_lambda_leaves_larger_residual(self, sweep_problem):
        problem, ds = sweep_problem
        groups = [GroupSpec(dimension="dim0", disadvantaged=frozenset({"d0c1"}))]
        cells = sweep_grid(problem, [100.0], [1.0, 10000.0], [1.0], groups)
        by_lam = {c.lambda_bar: c for c in cells}
        assert by_lam[1.0].capacity_residual > by_lam[10000.0].capacity_residual

    def test_grid_is_cartesian(self, sweep_problem):
        problem, ds = sweep_problem
        groups = [GroupSpec(dimension="dim0", disadvantaged=frozenset({"d0c1"}))]
        cells = sweep_grid(problem, [10.0, 100.0], [1.0], [1.0, 10.0, 100.0], groups)
        assert len(cells) == 6
        combos = {(c.beta, c.lambda_bar, c.tau_bar) for c in cells}
        assert len(combos) == 6

    def test_tau_partition_recovered_by_two_means(self, sweep_problem):
        problem, ds = sweep_problem
        groups = [GroupSpec(dimension="dim0", disadvantaged=frozenset({"d0c1"}))]
        cells = sweep_grid(
            problem, [50.0, 100.0, 200.0], [1.0], [1.0, 10000.0], groups
        )
        fam = SolutionFamily(
            matrices=[c.assignment for c in cells],
            labels=[(c.beta, c.lambda_bar, c.tau_bar) for c in cells],
        )
        coords = spectral_embed(similarity(fam), dim=2)
        _, labels = kmeans2(coords, 2, minit="++", seed=1)
        tau_flags = np.array([c.tau_bar == 10000.0 for c in cells])
        grouped = labels == labels[np.argmax(tau_flags)]
        assert (grouped == tau_flags).all() or (grouped == ~tau_flags).all()


def test_plot_script_is_valid_python(tmp_path):
    path = tmp_path / "plot_results.py"
    write_plot_script(path)
    compile(path.read_text(), str(path), "exec")
