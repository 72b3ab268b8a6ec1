"""Dataset loading, validation, persistence, and synthetic fixtures.

File layout: schema.json declares the attribute dimensions; collection.csv,
locations.csv and users.csv carry the tabular pieces; assignment.csv, when
present, is the current hanging as a dense matrix keyed by location and
object ids. Loading is strict by default: every bad row is collected and
reported in one failure.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .attributes import AttributeSchema, AttributeVector
from .population import Location, User


@dataclass(frozen=True)
class CollectionItem:
    id: str
    attributes: AttributeVector
    capacity: int = 1

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError(f"object {self.id!r}: capacity must be >= 1")


@dataclass
class Dataset:
    schema: AttributeSchema
    collection: list[CollectionItem]
    locations: list[Location]
    users: list[User]
    current_assignment: Optional[np.ndarray] = None
    warnings: list[str] = field(default_factory=list)
    dropped_rows: list[str] = field(default_factory=list)

    def __post_init__(self):
        ids = [c.id for c in self.collection]
        if len(set(ids)) != len(ids):
            raise DatasetError(["duplicate object ids"])
        ids = [loc.id for loc in self.locations]
        if len(set(ids)) != len(ids):
            raise DatasetError(["duplicate location ids"])
        ids = [u.id for u in self.users]
        if len(set(ids)) != len(ids):
            raise DatasetError(["duplicate user ids"])
        if self.current_assignment is not None:
            expected = (len(self.locations), len(self.collection))
            if self.current_assignment.shape != expected:
                raise DatasetError(
                    [f"assignment shape {self.current_assignment.shape} != {expected}"]
                )
        if sum(self.object_capacities) < sum(self.location_capacities):
            self.warnings.append(
                "total object capacity below total wall capacity; the usage "
                "penalty will be violated at any feasible assignment"
            )

    @property
    def object_ids(self) -> list[str]:
        return [c.id for c in self.collection]

    @property
    def location_ids(self) -> list[str]:
        return [loc.id for loc in self.locations]

    @property
    def location_capacities(self) -> np.ndarray:
        return np.array([loc.capacity for loc in self.locations], dtype=float)

    @property
    def object_capacities(self) -> np.ndarray:
        return np.array([c.capacity for c in self.collection], dtype=float)

    @property
    def collection_attributes(self) -> list[AttributeVector]:
        return [c.attributes for c in self.collection]


class DatasetError(ValueError):
    """Aggregate of per-row load failures."""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        preview = "; ".join(self.problems[:20])
        extra = "" if len(self.problems) <= 20 else f" (+{len(self.problems) - 20} more)"
        super().__init__(f"{len(self.problems)} problem(s): {preview}{extra}")


def save_schema(schema: AttributeSchema, path) -> None:
    payload = {"dimensions": [[name, list(cats)] for name, cats in schema.dimensions]}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)


def load_schema(path) -> AttributeSchema:
    with open(path) as fh:
        payload = json.load(fh)
    return AttributeSchema(
        dimensions=tuple(
            (name, tuple(cats)) for name, cats in payload["dimensions"]
        )
    )


def _parse_flags(raw: str) -> dict:
    schools = set()
    public = administrative = residential = False
    for token in filter(None, (t.strip() for t in raw.split(";"))):
        if token.startswith("academic:"):
            schools.add(token.split(":", 1)[1])
        elif token == "public":
            public = True
        elif token == "administrative":
            administrative = True
        elif token == "residential":
            residential = True
        else:
            raise ValueError(f"unknown flag {token!r}")
    return {
        "academic_schools": frozenset(schools),
        "public": public,
        "administrative": administrative,
        "residential": residential,
    }


def _format_flags(loc: Location) -> str:
    tokens = [f"academic:{s}" for s in sorted(loc.academic_schools)]
    if loc.public:
        tokens.append("public")
    if loc.administrative:
        tokens.append("administrative")
    if loc.residential:
        tokens.append("residential")
    return ";".join(tokens)


def _attr_from_row(
    row: dict, schema: AttributeSchema, rownum: int, problems: list[str]
) -> Optional[AttributeVector]:
    values = []
    for name, cats in schema.dimensions:
        label = row.get(name, "")
        if label not in cats:
            problems.append(f"row {rownum}: unknown category {label!r} in {name!r}")
            return None
        values.append(cats.index(label))
    return AttributeVector(schema=schema, values=tuple(values))


def load_dataset(
    directory, schema: Optional[AttributeSchema] = None, strict: bool = True
) -> Dataset:
    """Load a dataset directory; aggregate row problems into one failure.

    With strict=False, offending rows are dropped and listed in
    Dataset.dropped_rows instead of failing the load.
    """
    directory = str(directory)
    if schema is None:
        schema = load_schema(os.path.join(directory, "schema.json"))
    problems: list[str] = []

    collection: list[CollectionItem] = []
    with open(os.path.join(directory, "collection.csv"), newline="") as fh:
        for i, row in enumerate(csv.DictReader(fh), start=2):
            attrs = _attr_from_row(row, schema, i, problems)
            if attrs is None:
                continue
            try:
                k = int(row.get("k", "") or 1)
                collection.append(CollectionItem(id=row["id"], attributes=attrs, capacity=k))
            except (ValueError, KeyError) as exc:
                problems.append(f"collection row {i}: {exc}")

    locations: list[Location] = []
    with open(os.path.join(directory, "locations.csv"), newline="") as fh:
        for i, row in enumerate(csv.DictReader(fh), start=2):
            try:
                gps = None
                if row.get("lat") and row.get("lon"):
                    gps = (float(row["lat"]), float(row["lon"]))
                locations.append(
                    Location(
                        id=row["id"],
                        name=row.get("name", row["id"]),
                        capacity=int(row["capacity"]),
                        beds=int(row.get("beds", "") or 0),
                        gps=gps,
                        **_parse_flags(row.get("flags", "")),
                    )
                )
            except (ValueError, KeyError) as exc:
                problems.append(f"locations row {i}: {exc}")

    users: list[User] = []
    with open(os.path.join(directory, "users.csv"), newline="") as fh:
        for i, row in enumerate(csv.DictReader(fh), start=2):
            attrs = _attr_from_row(row, schema, i, problems)
            if attrs is None:
                continue
            try:
                users.append(User(id=row["id"], attributes=attrs, school=row["school"]))
            except KeyError as exc:
                problems.append(f"users row {i}: missing column {exc}")

    if problems and strict:
        raise DatasetError(problems)

    assignment = None
    assignment_path = os.path.join(directory, "assignment.csv")
    if os.path.exists(assignment_path):
        assignment, loc_ids, obj_ids = load_matrix_csv(assignment_path)
        if loc_ids != [loc.id for loc in locations] or obj_ids != [
            c.id for c in collection
        ]:
            raise DatasetError(["assignment.csv ids do not match dataset ids"])

    ds = Dataset(
        schema=schema,
        collection=collection,
        locations=locations,
        users=users,
        current_assignment=assignment,
    )
    ds.dropped_rows = problems
    return ds


def save_dataset(ds: Dataset, directory) -> None:
    directory = str(directory)
    os.makedirs(directory, exist_ok=True)
    save_schema(ds.schema, os.path.join(directory, "schema.json"))
    dim_names = list(ds.schema.dimension_names)

    with open(os.path.join(directory, "collection.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "k", *dim_names])
        for item in ds.collection:
            writer.writerow(
                [item.id, item.capacity, *ds.schema.labels_of(item.attributes)]
            )

    with open(os.path.join(directory, "locations.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "name", "capacity", "flags", "beds", "lat", "lon"])
        for loc in ds.locations:
            lat, lon = ("", "") if loc.gps is None else (repr(loc.gps[0]), repr(loc.gps[1]))
            writer.writerow(
                [loc.id, loc.name, loc.capacity, _format_flags(loc), loc.beds, lat, lon]
            )

    with open(os.path.join(directory, "users.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "school", *dim_names])
        for u in ds.users:
            writer.writerow([u.id, u.school, *ds.schema.labels_of(u.attributes)])

    if ds.current_assignment is not None:
        save_matrix_csv(
            os.path.join(directory, "assignment.csv"),
            ds.current_assignment,
            ds.location_ids,
            ds.object_ids,
        )


def save_matrix_csv(path, matrix: np.ndarray, row_ids: Sequence[str], col_ids: Sequence[str]) -> None:
    """Dense matrix with object-id header and location-id index; floats via
    repr so a reload is bit-identical."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["location_id", *col_ids])
        for rid, row in zip(row_ids, matrix):
            writer.writerow([rid, *[repr(float(v)) for v in row]])


def load_matrix_csv(path) -> tuple[np.ndarray, list[str], list[str]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        col_ids = header[1:]
        row_ids = []
        rows = []
        for row in reader:
            row_ids.append(row[0])
            rows.append([float(v) for v in row[1:]])
    return np.array(rows, dtype=float), row_ids, col_ids


def generate_synthetic(
    n_objects: int,
    n_locations: int,
    n_users: int,
    cardinalities: Sequence[int] = (2, 3),
    skew: float = 0.0,
    seed: int = 0,
    n_schools: int = 3,
) -> Dataset:
    """Reproducible synthetic dataset with controllable category skew.

    Category 0 of every dimension is the majority, drawn with probability
    skew + (1 - skew)/cardinality; the rest share the remainder evenly.
    skew=0 is uniform. Locations mix academic, public, administrative and
    residential space; the current assignment is a random feasible matrix.
    """
    if min(n_objects, n_locations, n_users) < 1:
        raise ValueError("sizes must be >= 1")
    if not (0.0 <= skew < 1.0):
        raise ValueError("skew must lie in [0, 1)")
    rng = np.random.default_rng(seed)

    dims = []
    for d, card in enumerate(cardinalities):
        dims.append((f"dim{d}", tuple(f"d{d}c{c}" for c in range(card))))
    schema = AttributeSchema(dimensions=tuple(dims))

    def draw_profile() -> AttributeVector:
        values = []
        for card in schema.cardinalities:
            p = np.full(card, (1.0 - skew) / card)
            p[0] += skew
            values.append(int(rng.choice(card, p=p)))
        return AttributeVector(schema=schema, values=tuple(values))

    collection = [
        CollectionItem(id=f"obj{m:04d}", attributes=draw_profile(), capacity=1)
        for m in range(n_objects)
    ]

    # locations at indexes 0, 4, 8, ... are academic: one school each, cycling
    n_schools = max(1, min(n_schools, (n_locations + 3) // 4))
    schools = [f"school{s}" for s in range(n_schools)]
    users = [
        User(id=f"user{t:05d}", attributes=draw_profile(), school=schools[t % n_schools])
        for t in range(n_users)
    ]

    locations: list[Location] = []
    beds_per_hall = max(1, n_users // max(1, n_locations))
    academic_count = 0
    for n in range(n_locations):
        capacity = int(rng.integers(2, 6))
        kind = n % 4
        if kind == 3 and n >= 3:
            locations.append(
                Location(
                    id=f"loc{n:02d}",
                    name=f"Hall {n}",
                    capacity=capacity,
                    residential=True,
                    beds=beds_per_hall,
                )
            )
        elif kind == 1 and n >= 1:
            locations.append(
                Location(
                    id=f"loc{n:02d}", name=f"Commons {n}", capacity=capacity, public=True
                )
            )
        elif kind == 2 and n >= 2:
            locations.append(
                Location(
                    id=f"loc{n:02d}",
                    name=f"Office {n}",
                    capacity=capacity,
                    administrative=True,
                )
            )
        else:
            locations.append(
                Location(
                    id=f"loc{n:02d}",
                    name=f"Department {n}",
                    capacity=capacity,
                    academic_schools=frozenset({schools[academic_count % n_schools]}),
                )
            )
            academic_count += 1

    h = np.array([loc.capacity for loc in locations], dtype=float)
    gaps = rng.exponential(size=(n_locations, n_objects))
    current = gaps / gaps.sum(axis=1, keepdims=True) * h[:, None]

    return Dataset(
        schema=schema,
        collection=collection,
        locations=locations,
        users=users,
        current_assignment=current,
    )
