"""Categorical attribute spaces, occupancy-quantized proportions and distances.

Users and objects live in one shared D-dimensional categorical space. All
distances here are derived from per-dimension proportional shares measured
against a reference population (a building's occupants or the whole
collection), so "how far apart" two profiles are depends on who else is in
the room.
"""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class AttributeSchema:
    """Ordered categorical dimensions, each with an ordered label list."""

    dimensions: tuple[tuple[str, tuple[str, ...]], ...]

    def __post_init__(self):
        if len(self.dimensions) < 1:
            raise ValueError("schema needs at least one dimension")
        names = [name for name, _ in self.dimensions]
        if len(set(names)) != len(names):
            raise ValueError("duplicate dimension names")
        for name, cats in self.dimensions:
            if len(cats) < 1:
                raise ValueError(f"dimension {name!r} has no categories")
            if len(set(cats)) != len(cats):
                raise ValueError(f"duplicate category labels in dimension {name!r}")

    @property
    def depth(self) -> int:
        """Number of dimensions D."""
        return len(self.dimensions)

    @property
    def cardinalities(self) -> tuple[int, ...]:
        return tuple(len(cats) for _, cats in self.dimensions)

    @property
    def dimension_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.dimensions)

    def dimension_index(self, name: str) -> int:
        try:
            return self.dimension_names.index(name)
        except ValueError:
            raise KeyError(f"unknown dimension {name!r}") from None

    def categories(self, name: str) -> tuple[str, ...]:
        return self.dimensions[self.dimension_index(name)][1]

    def category_index(self, dimension: str, label: str) -> int:
        cats = self.categories(dimension)
        try:
            return cats.index(label)
        except ValueError:
            raise KeyError(
                f"unknown category {label!r} in dimension {dimension!r}"
            ) from None

    def vector(self, *labels: str) -> "AttributeVector":
        """Build a vector from one category label per dimension."""
        if len(labels) != self.depth:
            raise ValueError(f"expected {self.depth} labels, got {len(labels)}")
        values = tuple(
            self.category_index(name, lab)
            for (name, _), lab in zip(self.dimensions, labels)
        )
        return AttributeVector(schema=self, values=values)

    def labels_of(self, vector: "AttributeVector") -> tuple[str, ...]:
        return tuple(
            self.dimensions[d][1][v] for d, v in enumerate(vector.values)
        )


@dataclass(frozen=True)
class AttributeVector:
    """A point in the categorical space: one category index per dimension."""

    schema: AttributeSchema
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != self.schema.depth:
            raise ValueError(
                f"vector has {len(self.values)} entries, schema has "
                f"{self.schema.depth} dimensions"
            )
        for d, v in enumerate(self.values):
            card = self.schema.cardinalities[d]
            if not (0 <= v < card):
                raise ValueError(
                    f"category index {v} out of range for dimension "
                    f"{self.schema.dimension_names[d]!r} (cardinality {card})"
                )


@dataclass(frozen=True)
class QuantizedVector:
    """Per-dimension proportional shares of a profile within a reference set."""

    proportions: tuple[float, ...]
    context: str

    def __post_init__(self):
        for p in self.proportions:
            if not (0.0 <= p <= 1.0):
                raise ValueError(f"proportion {p} outside [0, 1]")


def _require_shared_schema(vectors: Sequence[AttributeVector]) -> AttributeSchema:
    schema = vectors[0].schema
    for v in vectors[1:]:
        if v.schema != schema:
            raise ValueError("schema mismatch")
    return schema


def category_count_table(
    reference: Sequence[AttributeVector],
) -> np.ndarray:
    """Count occurrences of every category per dimension.

    Returns a (D, max_cardinality) int array; unused trailing slots stay 0.
    """
    if not reference:
        raise ValueError("empty occupancy")
    schema = _require_shared_schema(reference)
    depth = schema.depth
    table = np.zeros((depth, max(schema.cardinalities)), dtype=np.int64)
    idx = as_index_matrix(reference)
    for d in range(depth):
        counts = np.bincount(idx[:, d], minlength=schema.cardinalities[d])
        table[d, : len(counts)] = counts
    return table


def as_index_matrix(vectors: Sequence[AttributeVector]) -> np.ndarray:
    """Stack vectors into an (n, D) integer index matrix."""
    return np.array([v.values for v in vectors], dtype=np.int64)


def _shares_for(
    vector: AttributeVector, reference: Sequence[AttributeVector]
) -> np.ndarray:
    table = category_count_table(reference)
    size = len(reference)
    return np.array(
        [float(table[d, v]) / size for d, v in enumerate(vector.values)], dtype=float
    )


def quantize_user(
    user: AttributeVector, occupants: Sequence[AttributeVector]
) -> QuantizedVector:
    """Proportional share of occupants matching the user in each dimension."""
    if not occupants:
        raise ValueError("empty occupancy")
    _require_shared_schema([user, *occupants])
    return QuantizedVector(
        proportions=tuple(float(p) for p in _shares_for(user, occupants)),
        context="occupancy",
    )


def quantize_object(
    obj: AttributeVector, collection: Sequence[AttributeVector]
) -> QuantizedVector:
    """Proportional share of collection objects matching in each dimension."""
    if not collection:
        raise ValueError("empty collection")
    _require_shared_schema([obj, *collection])
    return QuantizedVector(
        proportions=tuple(float(p) for p in _shares_for(obj, collection)),
        context="collection",
    )


def rarity(obj: AttributeVector, collection: Sequence[AttributeVector]) -> float:
    """Product of the object's per-dimension collection shares.

    Small values mean the object's creator attributes are underrepresented in
    the collection. Returns 0 (with a warning) when some attribute never
    occurs in the collection; callers are expected to floor the result.
    """
    q = quantize_object(obj, collection)
    out = float(np.prod(q.proportions))
    if out == 0.0:
        warnings.warn("out-of-collection attribute", stacklevel=2)
    return out


def weighted_distance(
    x: AttributeVector,
    y: AttributeVector,
    occupants: Sequence[AttributeVector],
) -> float:
    """Occupancy-weighted distance between two profiles.

    Euclidean norm over dimensions of the share difference q(x_d) - q(y_d),
    counted only where the categories differ. Matching dimensions contribute
    exactly 0 (their shares coincide), so dropping the mismatch indicator is
    numerically identical.
    """
    if not occupants:
        raise ValueError("empty occupancy")
    _require_shared_schema([x, y, *occupants])
    table = category_count_table(occupants)
    size = len(occupants)
    total = 0.0
    for d, (xv, yv) in enumerate(zip(x.values, y.values)):
        if xv != yv:
            diff = (table[d, xv] - table[d, yv]) / size
            total += diff * diff
    return float(np.sqrt(total))


def raw_distance(x: AttributeVector, y: AttributeVector) -> float:
    """Euclidean norm of per-dimension mismatch indicators: sqrt(#mismatches)."""
    if x.schema != y.schema:
        raise ValueError("schema mismatch")
    mismatches = sum(1 for a, b in zip(x.values, y.values) if a != b)
    return float(np.sqrt(mismatches))


def location_mode(occupants: Sequence[AttributeVector]) -> AttributeVector:
    """Per-dimension most frequent category; ties break to the lowest index."""
    if not occupants:
        raise ValueError("empty occupancy")
    schema = _require_shared_schema(occupants)
    table = category_count_table(occupants)
    # argmax returns the first maximal entry, i.e. the lowest category index
    values = tuple(
        int(np.argmax(table[d, : schema.cardinalities[d]]))
        for d in range(schema.depth)
    )
    return AttributeVector(schema=schema, values=values)


def profile_counts(
    vectors: Sequence[AttributeVector],
) -> tuple[list[AttributeVector], np.ndarray]:
    """Collapse a multiset of vectors to (distinct profiles, counts)."""
    counter = Counter(vectors)
    profiles = list(counter.keys())
    counts = np.array([counter[p] for p in profiles], dtype=np.int64)
    return profiles, counts
