"""Group exposure before and after optimization
=============================================

Self-representative exposure counts the assignment weight a user meets on
objects sharing their own category. Averaged over a disadvantaged group
and its complement, the signed difference says who the hanging serves;
resampling the occupancies gives the spread.
"""

from curalloc import (
    GroupSpec,
    HyperParams,
    build_cost_matrix,
    fairness_table,
    generate_synthetic,
    init_uniform,
    resample,
    scale_hyperparams,
    solve,
    synthesize_occupancy,
)
from curalloc.fairness import format_table

ds = generate_synthetic(
    n_objects=60, n_locations=8, n_users=500, cardinalities=(2, 3),
    skew=0.8, seed=1,
)
occ = synthesize_occupancy(ds.users, ds.locations, seed=1)
C = build_cost_matrix(
    ds.locations, occ, ds.users, ds.collection_attributes, alpha=1.0, beta=100.0
)
h, k = ds.location_capacities, ds.object_capacities
lam_s, tau_s = scale_hyperparams(C, h, k, ds.current_assignment, r=50, seed=1)
hyper = HyperParams(
    beta=100.0, lambda_bar=1.0, tau_bar=1.0,
    lambda_scale=lam_s, tau_scale=tau_s,
    step_mode="theoretical", max_iters=1000,
)
report = solve(
    C, h, k, hyper, init_uniform(h, C.shape[1]),
    P_current=ds.current_assignment, initialization="uniform",
)

# fifty re-sampled "days", two group readings
rounds = resample(ds.users, ds.locations, n_rounds=50, base_seed=500)
groups = [
    GroupSpec(dimension="dim0", disadvantaged=frozenset({"d0c1"})),
    GroupSpec(dimension="dim1", disadvantaged=frozenset({"d1c1", "d1c2"})),
]
table = fairness_table(
    {"baseline": ds.current_assignment, "optimized": report.final},
    rounds, ds.users, ds.locations, ds.collection_attributes, groups,
)
print(format_table(table))

g = groups[0].name
print(
    f"\ngap for {g}: baseline {table['baseline'][g].mean_gap:+.3f} "
    f"-> optimized {table['optimized'][g].mean_gap:+.3f}"
)
print("(less negative means the disadvantaged group sees more of itself)")
