"""Placement propensity scores and the row-stochastic cost matrix.

Each (building, object) score sums, over the building's occupants, the
occupant's deviation from the building mode divided by the object's rarity
and its distance to the occupant. A row-softmax turns scores into a
probability-like cost row per building; the assignment program then treats
high-propensity pairs as expensive, which is what pushes mass toward objects
matching a building's minority occupants.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .attributes import (
    AttributeVector,
    as_index_matrix,
    category_count_table,
    location_mode,
    profile_counts,
    rarity,
    raw_distance,
    weighted_distance,
)
from .population import Location, OccupancyAssignment, User

DEFAULT_EPS_FLOOR = 1e-6


@dataclass(frozen=True)
class CostMatrix:
    """N x M cost entries (each row a softmax over objects) and the (alpha, beta) used."""

    entries: np.ndarray
    alpha: float
    beta: float
    eps_floor: float = DEFAULT_EPS_FLOOR

    def __post_init__(self):
        entries = self.entries
        if entries.ndim != 2:
            raise ValueError("cost entries must be a 2-D matrix")
        if not np.isfinite(entries).all():
            raise ValueError("non-finite cost entries")
        if (entries < 0).any():
            raise ValueError("negative cost entries")
        rows = entries.sum(axis=1)
        if np.abs(rows - 1.0).max() > 1e-9:
            raise ValueError("cost rows must sum to 1")

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def score(
    occupants: Sequence[AttributeVector],
    obj: AttributeVector,
    collection: Sequence[AttributeVector],
    alpha: float,
    beta: float,
    eps_floor: float = DEFAULT_EPS_FLOOR,
) -> float:
    """Raw propensity of one object for one building.

    sum over occupants s of (-alpha * |s - mode|_occ) / (beta * rho * |s - obj|),
    with both rho and the object distance floored at eps_floor. With the
    default alpha = +1 the exponent is negative, largest in magnitude for
    rare objects that sit close to the building's outlier occupants.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    if not occupants:
        raise ValueError("empty occupancy")
    mode = location_mode(occupants)
    rho = max(rarity(obj, collection), eps_floor)
    total = 0.0
    for s in occupants:
        w = weighted_distance(s, mode, occupants)
        d = max(raw_distance(s, obj), eps_floor)
        total += (-alpha * w) / (beta * rho * d)
    return total


def softmax_rows(scores: np.ndarray) -> np.ndarray:
    """Row-wise softmax with per-row max shift for overflow safety."""
    shifted = scores - scores.max(axis=1, keepdims=True)
    expd = np.exp(shifted)
    return expd / expd.sum(axis=1, keepdims=True)


def score_matrix(
    locations: Sequence[Location],
    occupancy: OccupancyAssignment,
    users: Sequence[User],
    collection: Sequence[AttributeVector],
    alpha: float,
    beta: float,
    eps_floor: float = DEFAULT_EPS_FLOOR,
) -> np.ndarray:
    """Raw N x M score matrix, vectorized over distinct occupant profiles.

    A building's score depends on its occupants only through their attribute
    profiles (distinct profiles share the same mode deviation), so occupants
    collapse to (profile, count) pairs before the object loop.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    if not collection:
        raise ValueError("empty collection")
    by_id = {u.id: u.attributes for u in users}

    obj_idx = as_index_matrix(collection)  # (M, D)
    n_objects, depth = obj_idx.shape
    coll_table = category_count_table(collection).astype(float) / len(collection)
    rho = np.ones(n_objects)
    for d in range(depth):
        rho *= coll_table[d, obj_idx[:, d]]
    rho = np.maximum(rho, eps_floor)

    out = np.zeros((len(locations), n_objects))
    for n, loc in enumerate(locations):
        ids = occupancy.occupants_of(loc.id)
        if not ids:
            raise ValueError(f"location {loc.id!r} has empty occupancy")
        occupants = [by_id[i] for i in ids]
        profiles, counts = profile_counts(occupants)
        prof_idx = as_index_matrix(profiles)  # (P, D)
        table = category_count_table(occupants).astype(float) / len(occupants)
        mode = np.array(
            [int(np.argmax(table[d])) for d in range(depth)], dtype=np.int64
        )

        # deviation of each profile from the building mode
        share_diff = np.zeros(len(profiles))
        for d in range(depth):
            diff = table[d, prof_idx[:, d]] - table[d, mode[d]]
            diff[prof_idx[:, d] == mode[d]] = 0.0
            share_diff += diff * diff
        weights = counts * np.sqrt(share_diff)  # (P,)

        mism = (prof_idx[:, None, :] != obj_idx[None, :, :]).sum(axis=2)  # (P, M)
        dist = np.maximum(np.sqrt(mism.astype(float)), eps_floor)
        out[n] = (-alpha / (beta * rho)) * (weights[:, None] / dist).sum(axis=0)

    return out


def build_cost_matrix(
    locations: Sequence[Location],
    occupancy: OccupancyAssignment,
    users: Sequence[User],
    collection: Sequence[AttributeVector],
    alpha: float,
    beta: float,
    eps_floor: float = DEFAULT_EPS_FLOOR,
) -> CostMatrix:
    """Row-softmax of the score matrix; rows sum to 1."""
    raw = score_matrix(locations, occupancy, users, collection, alpha, beta, eps_floor)
    bad = ~np.isfinite(raw)
    if bad.any():
        n, m = np.argwhere(bad)[0]
        raise ValueError(f"non-finite score at location index {n}, object index {m}")
    return CostMatrix(
        entries=softmax_rows(raw), alpha=alpha, beta=beta, eps_floor=eps_floor
    )
