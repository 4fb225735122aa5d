"""Object catalog, demonstrations, dataset files, and descriptive statistics.

The catalog lists every packable object with its bounding box. A
demonstration is one packed scene: the ordered object sequence, the task
duration, and (optionally) one placement record per packed object.
Dataset and catalog files are UTF-8 JSON lines, one record per line; see
the README for the field reference.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field


class DatasetError(Exception):
    """Malformed dataset/catalog file or a record that violates an invariant."""


class SceneSamplingError(RuntimeError):
    """No object subset hit the target volume band within the attempt cap."""


@dataclass(frozen=True)
class CatalogObject:
    object_id: str
    display_name: str
    bbox: tuple[float, float, float]  # (width, depth, height) in meters

    def __post_init__(self):
        if not self.object_id:
            raise ValueError("object_id must be non-empty")
        if len(self.bbox) != 3 or any(not (d > 0) for d in self.bbox):
            raise ValueError(f"bbox dims must be strictly positive: {self.object_id!r}")

    @property
    def volume(self) -> float:
        w, d, h = self.bbox
        return w * d * h


class ObjectCatalog:
    """Immutable, id-addressable collection of packable objects."""

    def __init__(self, objects):
        objects = list(objects)
        seen: set[str] = set()
        for obj in objects:
            if obj.object_id in seen:
                raise ValueError(f"duplicate object id: {obj.object_id!r}")
            seen.add(obj.object_id)
        self._by_id = {o.object_id: o for o in objects}

    def __len__(self) -> int:
        return len(self._by_id)

    def __contains__(self, object_id: str) -> bool:
        return object_id in self._by_id

    def __iter__(self):
        return iter(self._by_id.values())

    def get(self, object_id: str) -> CatalogObject:
        try:
            return self._by_id[object_id]
        except KeyError:
            raise KeyError(f"unknown object id: {object_id!r}") from None

    @property
    def ids(self) -> list[str]:
        return list(self._by_id)

    def total_volume(self) -> float:
        return math.fsum(o.volume for o in self)


@dataclass(frozen=True)
class ContainerSpec:
    width: float
    depth: float
    height: float

    def __post_init__(self):
        if any(not (d > 0) for d in (self.width, self.depth, self.height)):
            raise ValueError("container dims must be strictly positive")

    @property
    def volume(self) -> float:
        return self.width * self.depth * self.height


@dataclass(frozen=True)
class PlacementRecord:
    """Final pose of one packed object.

    x/y are top-down coordinates normalized to the unit square; z is the
    placement height in meters. Euler angles are stored in degrees but not
    analyzed anywhere in this package.
    """

    object_id: str
    x: float
    y: float
    z: float
    rx: float = 0.0
    ry: float = 0.0
    rz: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.x <= 1.0) or not (0.0 <= self.y <= 1.0):
            raise ValueError(f"placement x/y out of [0,1]: {self.object_id!r}")
        if self.z < 0.0:
            raise ValueError(f"placement z must be >= 0: {self.object_id!r}")


@dataclass
class Demonstration:
    """One packed scene."""

    scene_id: str
    participant_id: str
    sequence: list[str]
    duration_s: float
    placements: list[PlacementRecord] | None = None
    # Walk steps that fell back to a uniform pick (synthetic data only).
    fallback_steps: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.sequence:
            raise ValueError(f"empty sequence in scene {self.scene_id!r}")
        if len(set(self.sequence)) != len(self.sequence):
            raise ValueError(f"duplicate object in scene {self.scene_id!r}")
        if self.duration_s < 0:
            raise ValueError(f"negative duration in scene {self.scene_id!r}")
        if self.placements is not None and len(self.placements) != len(self.sequence):
            raise ValueError(
                f"placements length != sequence length in scene {self.scene_id!r}"
            )

    @property
    def object_set(self) -> set[str]:
        return set(self.sequence)


def check_against_catalog(demo: Demonstration, catalog: ObjectCatalog) -> None:
    for object_id in demo.sequence:
        if object_id not in catalog:
            raise DatasetError(
                f"unknown object {object_id!r} in scene {demo.scene_id!r}"
            )


# ---------------------------------------------------------------------------
# File I/O (JSON lines)
# ---------------------------------------------------------------------------

def load_catalog(path) -> ObjectCatalog:
    objects = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                objects.append(
                    CatalogObject(rec["id"], rec["name"], tuple(rec["bbox"]))
                )
            except (ValueError, KeyError, TypeError) as exc:
                raise DatasetError(f"{path}:{lineno}: bad catalog record: {exc}") from exc
    try:
        return ObjectCatalog(objects)
    except ValueError as exc:
        raise DatasetError(f"{path}: {exc}") from exc


def write_catalog(catalog: ObjectCatalog, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for obj in catalog:
            rec = {"id": obj.object_id, "name": obj.display_name, "bbox": list(obj.bbox)}
            fh.write(json.dumps(rec) + "\n")


def _demo_to_record(demo: Demonstration) -> dict:
    rec = {
        "scene_id": demo.scene_id,
        "participant_id": demo.participant_id,
        "duration_s": demo.duration_s,
        "sequence": list(demo.sequence),
    }
    if demo.placements is not None:
        rec["placements"] = [
            {"x": p.x, "y": p.y, "z": p.z, "rx": p.rx, "ry": p.ry, "rz": p.rz}
            for p in demo.placements
        ]
    if demo.fallback_steps:
        rec["fallback_steps"] = list(demo.fallback_steps)
    return rec


def _demo_from_record(rec: dict) -> Demonstration:
    placements = None
    if "placements" in rec:
        placements = [
            PlacementRecord(object_id=obj, **p)
            for obj, p in zip(rec["sequence"], rec["placements"], strict=True)
        ]
    return Demonstration(
        scene_id=rec["scene_id"],
        participant_id=rec["participant_id"],
        sequence=list(rec["sequence"]),
        duration_s=rec["duration_s"],
        placements=placements,
        fallback_steps=list(rec.get("fallback_steps", [])),
    )


def load_dataset(path, catalog: ObjectCatalog | None = None) -> list[Demonstration]:
    """Read demonstrations from a JSON-lines file.

    Raises DatasetError naming the line number for malformed lines and the
    object/scene for catalog mismatches (when a catalog is given).
    """
    demos = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                demo = _demo_from_record(json.loads(line))
            except (ValueError, KeyError, TypeError) as exc:
                raise DatasetError(f"{path}:{lineno}: bad demonstration: {exc}") from exc
            if catalog is not None:
                check_against_catalog(demo, catalog)
            demos.append(demo)
    return demos


def write_dataset(demos, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for demo in demos:
            fh.write(json.dumps(_demo_to_record(demo)) + "\n")


# ---------------------------------------------------------------------------
# Scene composition
# ---------------------------------------------------------------------------

VOLUME_BAND = (0.70, 0.90)  # subset bbox volume as a fraction of the container
MAX_SAMPLE_ATTEMPTS = 10_000


def sample_scene(
    catalog: ObjectCatalog,
    container: ContainerSpec,
    seed: int,
    max_attempts: int = MAX_SAMPLE_ATTEMPTS,
) -> set[str]:
    """Draw a random object subset whose total bbox volume lands in the band.

    Rejection sampling over uniform subsets (each object kept with p=1/2).
    The same seed always returns the same subset.
    """
    if len(catalog) == 0:
        raise ValueError("catalog is empty")
    rng = random.Random(seed)
    lo = VOLUME_BAND[0] * container.volume
    hi = VOLUME_BAND[1] * container.volume
    ids = catalog.ids
    volumes = [catalog.get(i).volume for i in ids]
    for _ in range(max_attempts):
        keep = [rng.random() < 0.5 for _ in ids]
        total = math.fsum(v for v, k in zip(volumes, keep) if k)
        if lo <= total <= hi:
            return {i for i, k in zip(ids, keep) if k}
    raise SceneSamplingError(
        f"no subset hit [{lo:.6g}, {hi:.6g}] m^3 in {max_attempts} attempts"
    )


# ---------------------------------------------------------------------------
# Descriptive statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DatasetStats:
    count: int
    duration_mean: float
    duration_std: float  # population standard deviation
    bin_width: float
    histogram: list[int]  # bin i covers [i*bin_width, (i+1)*bin_width)


@dataclass(frozen=True)
class PlacementStats:
    object_id: str
    mean_x: float
    mean_y: float
    std_x: float  # population standard deviation per axis
    std_y: float
    count: int


def _mean_pop_std(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / n
    return mean, math.sqrt(var)


def dataset_stats(demos, bin_width: float = 10.0) -> DatasetStats:
    """Count, duration mean/std (population), and a duration histogram.

    Histogram bins cover [0, max duration]; a duration equal to the top
    edge is counted in the last bin.
    """
    demos = list(demos)
    if not demos:
        raise ValueError("dataset_stats requires at least one demonstration")
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    durations = [d.duration_s for d in demos]
    mean, std = _mean_pop_std(durations)
    top = max(durations)
    nbins = max(1, math.ceil(top / bin_width)) if top > 0 else 1
    hist = [0] * nbins
    for v in durations:
        hist[min(int(v // bin_width), nbins - 1)] += 1
    return DatasetStats(len(demos), mean, std, bin_width, hist)


def placement_stats(demos, object_id: str) -> PlacementStats:
    """Mean and per-axis std of an object's normalized top-down placements.

    Placement height (z) is ignored; only x/y enter the statistics.
    """
    xs, ys = [], []
    for demo in demos:
        if demo.placements is None:
            continue
        for rec in demo.placements:
            if rec.object_id == object_id:
                xs.append(rec.x)
                ys.append(rec.y)
    if not xs:
        raise DatasetError(f"object {object_id!r} has no recorded placements")
    mx, sx = _mean_pop_std(xs)
    my, sy = _mean_pop_std(ys)
    return PlacementStats(object_id, mx, my, sx, sy, len(xs))


def duration_by_object_count(demos) -> tuple[list[float], list[float]]:
    """(object count, duration) pairs for the duration-vs-size regression."""
    xs = [float(len(d.sequence)) for d in demos]
    ys = [d.duration_s for d in demos]
    return xs, ys


# ---------------------------------------------------------------------------
# Built-in fixture catalog (grocery-like objects, bounding boxes in meters)
# ---------------------------------------------------------------------------

_DEFAULT_OBJECTS = [
    ("cracker_box", "Cracker box", (0.060, 0.158, 0.210)),
    ("cereal_box", "Cereal box", (0.040, 0.170, 0.260)),
    ("bleach_cleanser", "Bleach cleanser", (0.065, 0.098, 0.250)),
    ("chips_can", "Chips can", (0.075, 0.075, 0.250)),
    ("milk_carton", "Milk carton", (0.070, 0.070, 0.200)),
    ("juice_bottle", "Juice bottle", (0.080, 0.080, 0.230)),
    ("bowl", "Bowl", (0.159, 0.159, 0.053)),
    ("mustard_bottle", "Mustard bottle", (0.058, 0.095, 0.190)),
    ("sugar_box", "Sugar box", (0.038, 0.089, 0.175)),
    ("master_chef_can", "Coffee can", (0.102, 0.102, 0.140)),
    ("coffee_tin", "Coffee tin", (0.095, 0.095, 0.120)),
    ("pasta_box", "Pasta box", (0.040, 0.120, 0.220)),
    ("tomato_soup_can", "Tomato soup can", (0.066, 0.066, 0.101)),
    ("potted_meat_can", "Potted meat can", (0.050, 0.097, 0.082)),
    ("pudding_box", "Pudding box", (0.035, 0.110, 0.089)),
    ("gelatin_box", "Gelatin box", (0.028, 0.085, 0.073)),
    ("tuna_fish_can", "Tuna fish can", (0.085, 0.085, 0.033)),
    ("bread", "Bread loaf", (0.110, 0.090, 0.060)),
    ("mug", "Mug", (0.093, 0.093, 0.082)),
    ("apple", "Apple", (0.075, 0.075, 0.075)),
    ("banana", "Banana", (0.036, 0.190, 0.036)),
    ("sponge", "Sponge", (0.072, 0.114, 0.014)),
    ("strawberry", "Strawberry", (0.035, 0.045, 0.043)),
    ("toothbrush", "Toothbrush", (0.180, 0.015, 0.020)),
]


def default_catalog() -> ObjectCatalog:
    """24 grocery-like objects with plausible bounding boxes."""
    return ObjectCatalog(CatalogObject(i, n, b) for i, n, b in _DEFAULT_OBJECTS)


def default_container() -> ContainerSpec:
    # Sized so that a uniform half-catalog subset typically lands inside
    # the 70-90% volume band (keeps rejection sampling cheap).
    return ContainerSpec(0.36, 0.28, 0.125)
