"""Synthetic building occupancy from enrollment and space metadata.

Four filling rules compose the per-building occupant sets: everyone enters
the academic buildings of their own school; small random fractions pass
through administrative and public buildings; a residential cohort is split
across residence halls in proportion to bed counts. Rules are applied
independently, so one student can land in several buildings, and the whole
procedure is deterministic per seed so it can be resampled for statistics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .attributes import AttributeVector


@dataclass(frozen=True)
class Location:
    """A building with wall capacity and the populations it serves."""

    id: str
    name: str
    capacity: int
    academic_schools: frozenset[str] = frozenset()
    public: bool = False
    administrative: bool = False
    residential: bool = False
    beds: int = 0
    gps: Optional[tuple[float, float]] = None

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError(f"location {self.id!r}: capacity must be >= 1")
        if self.beds < 0:
            raise ValueError(f"location {self.id!r}: negative beds")
        if not (
            self.academic_schools or self.public or self.administrative or self.residential
        ):
            raise ValueError(f"location {self.id!r}: no space flags set")


@dataclass(frozen=True)
class User:
    id: str
    attributes: AttributeVector
    school: str


@dataclass(frozen=True)
class OccupancyAssignment:
    """Per-location occupant id lists for one sampled day, plus its seed."""

    members: dict[str, tuple[str, ...]]
    seed: int
    warnings: tuple[str, ...] = field(default=())

    def occupants_of(self, location_id: str) -> tuple[str, ...]:
        return self.members.get(location_id, ())


def _round_half_even(x: float) -> int:
    return int(round(x))


def synthesize_occupancy(
    users: Sequence[User],
    locations: Sequence[Location],
    seed: int,
    admin_fraction: float = 0.01,
    public_fraction: float = 0.02,
    residential_cohort: Optional[int] = None,
) -> OccupancyAssignment:
    """Fill buildings with users according to the four rules.

    Rule 1 is deterministic (school -> academic buildings); rules 2-3 draw
    round-half-even(fraction * T) users uniformly without replacement per
    flagged building; rule 4 splits a shuffled residential cohort across
    halls proportionally to beds. One seed fixes the whole draw.
    """
    if not locations:
        raise ValueError("no locations")
    for frac in (admin_fraction, public_fraction):
        if not (0.0 <= frac <= 1.0):
            raise ValueError(f"fraction {frac} outside [0, 1]")

    rng = np.random.default_rng(seed)
    total = len(users)
    members: dict[str, list[str]] = {loc.id: [] for loc in locations}
    notes: list[str] = []

    # rule 1: school -> all academic buildings of that school
    schools_served = set()
    for loc in locations:
        schools_served.update(loc.academic_schools)
    missing = sorted({u.school for u in users} - schools_served)
    for school in missing:
        notes.append(f"school {school!r} has no academic building; rule 1 skipped")
    for loc in locations:
        if loc.academic_schools:
            for u in users:
                if u.school in loc.academic_schools:
                    members[loc.id].append(u.id)

    # rules 2-3: independent uniform draws per flagged building
    def draw(fraction: float) -> list[str]:
        size = min(_round_half_even(fraction * total), total)
        if size == 0:
            return []
        picked = rng.choice(total, size=size, replace=False)
        return [users[i].id for i in picked]

    for loc in locations:
        if loc.administrative:
            members[loc.id].extend(draw(admin_fraction))
    for loc in locations:
        if loc.public:
            members[loc.id].extend(draw(public_fraction))

    # rule 4: proportional-to-beds split of a shuffled cohort
    halls = [loc for loc in locations if loc.residential and loc.beds > 0]
    for loc in locations:
        if loc.residential and loc.beds == 0:
            notes.append(f"residence hall {loc.id!r} has no beds; skipped")
    total_beds = sum(h.beds for h in halls)
    wanted = residential_cohort
    if wanted is None:
        wanted = min(total_beds, total)
    if wanted > 0 and total_beds == 0:
        notes.append("no beds available; rule 4 skipped")
    elif wanted > 0 and halls:
        cohort_size = min(wanted, total, total_beds)
        if cohort_size < wanted:
            notes.append(
                f"residential cohort clamped from {wanted} to {cohort_size}"
            )
        cohort = rng.permutation(total)[:cohort_size]
        quotas = _proportional_quotas(
            np.array([h.beds for h in halls], dtype=np.int64), cohort_size
        )
        start = 0
        for hall, quota in zip(halls, quotas):
            for i in cohort[start : start + quota]:
                members[hall.id].append(users[i].id)
            start += quota

    return OccupancyAssignment(
        members={k: tuple(v) for k, v in members.items()},
        seed=seed,
        warnings=tuple(notes),
    )


def _proportional_quotas(beds: np.ndarray, cohort_size: int) -> np.ndarray:
    """Largest-remainder apportionment of the cohort, capped at bed counts."""
    total_beds = int(beds.sum())
    exact = beds * cohort_size / total_beds
    quotas = np.floor(exact).astype(np.int64)
    remainder = cohort_size - int(quotas.sum())
    if remainder > 0:
        order = np.argsort(-(exact - quotas), kind="stable")
        for i in order[:remainder]:
            quotas[i] += 1
    # cohort_size <= total_beds keeps every quota within its hall's beds
    assert (quotas <= beds).all()
    return quotas


def resample(
    users: Sequence[User],
    locations: Sequence[Location],
    n_rounds: int,
    base_seed: int,
    **kwargs,
) -> list[OccupancyAssignment]:
    """Independent occupancy draws with seeds base_seed, base_seed+1, ..."""
    if n_rounds < 1:
        raise ValueError("n_rounds must be >= 1")
    return [
        synthesize_occupancy(users, locations, base_seed + i, **kwargs)
        for i in range(n_rounds)
    ]


def occupancy_to_json(assignment: OccupancyAssignment) -> dict[str, list[str]]:
    """The wire format: {location_id: [user_id, ...]}."""
    return {loc: list(ids) for loc, ids in assignment.members.items()}


def save_occupancy(assignment: OccupancyAssignment, path) -> None:
    with open(path, "w") as fh:
        json.dump(occupancy_to_json(assignment), fh, indent=1)


def load_occupancy(path, seed: int = -1) -> OccupancyAssignment:
    with open(path) as fh:
        raw = json.load(fh)
    return OccupancyAssignment(
        members={k: tuple(v) for k, v in raw.items()}, seed=seed
    )
