"""Self-representative exposure per user group and the signed gap score.

A user's exposure counts, across every building they pass through, the
assignment weight landing on objects whose creator shares the user's own
category in the chosen dimension. Group fairness compares the mean exposure
of a disadvantaged group against its complement; the difference is kept
signed so improvements for the disadvantaged side read as increases.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .attributes import AttributeSchema, AttributeVector
from .optimizer import AssignmentMatrix
from .population import Location, OccupancyAssignment, User


@dataclass(frozen=True)
class GroupSpec:
    """A dimension plus the category labels forming the disadvantaged group."""

    dimension: str
    disadvantaged: frozenset[str]
    name: str = ""

    def __post_init__(self):
        if not self.disadvantaged:
            raise ValueError("disadvantaged category set is empty")
        if not self.name:
            object.__setattr__(
                self, "name", f"{self.dimension}:{'|'.join(sorted(self.disadvantaged))}"
            )

    def validate_against(self, schema: AttributeSchema) -> None:
        cats = set(schema.categories(self.dimension))
        unknown = self.disadvantaged - cats
        if unknown:
            raise ValueError(f"unknown categories {sorted(unknown)}")
        if self.disadvantaged >= cats:
            raise ValueError("disadvantaged set must be a strict subset")

    def member_mask(self, users: Sequence[User], schema: AttributeSchema) -> np.ndarray:
        dim = schema.dimension_index(self.dimension)
        wanted = {schema.category_index(self.dimension, c) for c in self.disadvantaged}
        return np.array([u.attributes.values[dim] in wanted for u in users])


@dataclass
class GroupStats:
    """Mean and spread of exposure for a group and its complement, plus the gap."""

    group_mean: float
    group_std: float
    complement_mean: float
    complement_std: float
    gap_per_round: list[float]

    @property
    def mean_gap(self) -> float:
        return float(np.mean(self.gap_per_round))


FairnessReport = dict[str, dict[str, GroupStats]]


def _entries(P: Union[AssignmentMatrix, np.ndarray]) -> np.ndarray:
    if isinstance(P, AssignmentMatrix):
        return P.entries
    return np.asarray(P, dtype=float)


def exposure_by_user(
    users: Sequence[User],
    occupancy: OccupancyAssignment,
    P: Union[AssignmentMatrix, np.ndarray],
    locations: Sequence[Location],
    collection: Sequence[AttributeVector],
    dimension: str,
) -> np.ndarray:
    """Exposure of every user at once: sum over their buildings of the row
    mass on objects matching the user's category in `dimension`."""
    P = _entries(P)
    schema = users[0].attributes.schema if users else collection[0].schema
    dim = schema.dimension_index(dimension)
    card = schema.cardinalities[dim]
    obj_cat = np.array([a.values[dim] for a in collection], dtype=np.int64)

    # row-by-category mass: weight each building row gives to each category
    mass = np.zeros((len(locations), card))
    for c in range(card):
        mass[:, c] = P[:, obj_cat == c].sum(axis=1)

    index_of = {u.id: i for i, u in enumerate(users)}
    user_cat = np.array([u.attributes.values[dim] for u in users], dtype=np.int64)
    out = np.zeros(len(users))
    for n, loc in enumerate(locations):
        for uid in occupancy.occupants_of(loc.id):
            i = index_of[uid]
            out[i] += mass[n, user_cat[i]]
    return out


def representative_exposure(
    user: User,
    occupancy: OccupancyAssignment,
    P: Union[AssignmentMatrix, np.ndarray],
    locations: Sequence[Location],
    collection: Sequence[AttributeVector],
    group: GroupSpec,
) -> float:
    """Expected number of self-representative objects one user sees."""
    P = _entries(P)
    schema = user.attributes.schema
    dim = schema.dimension_index(group.dimension)
    cat = user.attributes.values[dim]
    match = np.array([a.values[dim] == cat for a in collection], dtype=float)
    total = 0.0
    for n, loc in enumerate(locations):
        hits = sum(1 for uid in occupancy.occupants_of(loc.id) if uid == user.id)
        if hits:
            total += hits * float(P[n] @ match)
    return total


def group_expectation(
    users: Sequence[User],
    occupancy: OccupancyAssignment,
    P: Union[AssignmentMatrix, np.ndarray],
    locations: Sequence[Location],
    collection: Sequence[AttributeVector],
    group: GroupSpec,
    members: Optional[np.ndarray] = None,
) -> float:
    """Mean exposure over the group's members."""
    schema = users[0].attributes.schema
    if members is None:
        members = group.member_mask(users, schema)
    if not members.any():
        raise ValueError("empty group")
    exposures = exposure_by_user(
        users, occupancy, P, locations, collection, group.dimension
    )
    return float(exposures[members].mean())


def fairness_table(
    assignments: dict[str, Union[AssignmentMatrix, np.ndarray]],
    rounds: Sequence[OccupancyAssignment],
    users: Sequence[User],
    locations: Sequence[Location],
    collection: Sequence[AttributeVector],
    groups: Sequence[GroupSpec],
) -> FairnessReport:
    """Per (assignment, group) exposure statistics across resampling rounds.

    Mirrors the usual comparison layout: one row per assignment, one column
    pair (group, complement) per group spec, each cell mean +/- sample std
    over the rounds, plus the signed per-round gap.
    """
    if not rounds:
        raise ValueError("need at least one occupancy round")
    schema = users[0].attributes.schema
    for g in groups:
        g.validate_against(schema)
    masks = {g.name: g.member_mask(users, schema) for g in groups}
    for g in groups:
        if not masks[g.name].any():
            raise ValueError(f"empty group {g.name!r}")
        if masks[g.name].all():
            raise ValueError(f"group {g.name!r} has an empty complement")

    report: FairnessReport = {}
    for label, P in assignments.items():
        per_group: dict[str, GroupStats] = {}
        g_rounds = {g.name: ([], []) for g in groups}
        for occ in rounds:
            for g in groups:
                exposures = exposure_by_user(
                    users, occ, P, locations, collection, g.dimension
                )
                mask = masks[g.name]
                g_rounds[g.name][0].append(float(exposures[mask].mean()))
                g_rounds[g.name][1].append(float(exposures[~mask].mean()))
        for g in groups:
            g_vals, c_vals = g_rounds[g.name]
            per_group[g.name] = GroupStats(
                group_mean=float(np.mean(g_vals)),
                group_std=_sample_std(g_vals),
                complement_mean=float(np.mean(c_vals)),
                complement_std=_sample_std(c_vals),
                gap_per_round=[g - c for g, c in zip(g_vals, c_vals)],
            )
        report[label] = per_group
    return report


def _sample_std(values: Sequence[float]) -> float:
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1))


def report_to_dict(report: FairnessReport) -> dict:
    return {
        label: {
            gname: {
                "group_mean": s.group_mean,
                "group_std": s.group_std,
                "complement_mean": s.complement_mean,
                "complement_std": s.complement_std,
                "mean_gap": s.mean_gap,
                "gap_per_round": s.gap_per_round,
            }
            for gname, s in cells.items()
        }
        for label, cells in report.items()
    }


def format_table(report: FairnessReport) -> str:
    """Aligned text table: assignment rows, (group, complement) column pairs."""
    group_names = list(next(iter(report.values())).keys()) if report else []
    headers = ["assignment"]
    for g in group_names:
        headers += [f"{g} (group)", f"{g} (complement)", f"{g} (gap)"]
    rows = [headers]
    for label, cells in report.items():
        row = [label]
        for g in group_names:
            s = cells[g]
            row += [
                f"{s.group_mean:.3f} +/- {s.group_std:.3f}",
                f"{s.complement_mean:.3f} +/- {s.complement_std:.3f}",
                f"{s.mean_gap:+.3f}",
            ]
        rows.append(row)
    widths = [max(len(r[i]) for r in rows) for i in range(len(headers))]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))
        if i == 0:
            lines.append("-" * len(lines[0]))
    return "\n".join(lines)
