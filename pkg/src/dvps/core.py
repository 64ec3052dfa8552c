"""Domain types for panoptic video rasters plus tube extraction and
horizontal concatenation.

A panoptic raster stores, per pixel, a semantic class id and an instance id.
Instance ids are 0 for stuff and void pixels and >= 1 for thing pixels, so a
(class, instance) pair identifies one region. A tube is the set of pixels of
one such pair across the frames of a clip.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence as SequenceT

import numpy as np

from .errors import DimensionError, ValidationError

THING = "thing"
STUFF = "stuff"

# Composite encoding used by the on-disk panoptic format and for internal
# region bookkeeping: composite = semantic_id * 2**16 + instance_id.
INSTANCE_DIVISOR = 1 << 16


def _freeze(a: np.ndarray, dtype) -> np.ndarray:
    """Return a read-only array of `dtype`, copying only when needed."""
    arr = np.asarray(a, dtype=dtype)
    if arr.flags.writeable:
        arr = arr.copy()
        arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ClassDef:
    class_id: int
    name: str
    kind: str  # THING or STUFF

    def __post_init__(self):
        if self.kind not in (THING, STUFF):
            raise ValidationError(f"class {self.name!r}: kind must be thing or stuff")
        if self.class_id < 0:
            raise ValidationError(f"class {self.name!r}: negative class id")


@dataclass(frozen=True)
class LabelSpec:
    """The class vocabulary of a dataset: thing/stuff classes plus a void id."""

    classes: tuple[ClassDef, ...]
    void_id: int

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        if not self.classes:
            raise ValidationError("label spec needs at least one class")
        ids = [c.class_id for c in self.classes]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate class ids in label spec")
        if self.void_id in ids:
            raise ValidationError("void id collides with a class id")
        if self.void_id < 0:
            raise ValidationError("void id must be nonnegative")

    @cached_property
    def class_ids(self) -> frozenset[int]:
        return frozenset(c.class_id for c in self.classes)

    @cached_property
    def thing_ids(self) -> frozenset[int]:
        return frozenset(c.class_id for c in self.classes if c.kind == THING)

    @cached_property
    def stuff_ids(self) -> frozenset[int]:
        return frozenset(c.class_id for c in self.classes if c.kind == STUFF)

    def is_thing(self, class_id: int) -> bool:
        return class_id in self.thing_ids

    def name_of(self, class_id: int) -> str:
        for c in self.classes:
            if c.class_id == class_id:
                return c.name
        if class_id == self.void_id:
            return "void"
        raise KeyError(class_id)

    def to_dict(self) -> dict:
        return {
            "void_id": self.void_id,
            "classes": [
                {"id": c.class_id, "name": c.name, "kind": c.kind}
                for c in self.classes
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LabelSpec":
        classes = tuple(
            ClassDef(int(c["id"]), str(c["name"]), str(c["kind"]))
            for c in d["classes"]
        )
        return cls(classes=classes, void_id=int(d["void_id"]))


@dataclass(frozen=True)
class PanopticMap:
    """Per-pixel (semantic id, instance id) raster. Immutable after creation."""

    semantic: np.ndarray
    instance: np.ndarray

    def __post_init__(self):
        sem = _freeze(self.semantic, np.int32)
        inst = _freeze(self.instance, np.int32)
        if sem.ndim != 2:
            raise DimensionError("semantic layer must be 2-D")
        if sem.shape != inst.shape:
            raise DimensionError(
                f"semantic {sem.shape} and instance {inst.shape} shapes differ"
            )
        if sem.size and (sem.min() < 0 or inst.min() < 0):
            raise ValidationError("semantic and instance ids must be nonnegative")
        object.__setattr__(self, "semantic", sem)
        object.__setattr__(self, "instance", inst)

    @property
    def height(self) -> int:
        return self.semantic.shape[0]

    @property
    def width(self) -> int:
        return self.semantic.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.semantic.shape

    def composite(self) -> np.ndarray:
        """int64 composite codes, semantic * 2**16 + instance."""
        return self.semantic.astype(np.int64) * INSTANCE_DIVISOR + self.instance

    def validate(self, spec: LabelSpec) -> None:
        """Raise ValidationError unless the raster satisfies all invariants."""
        known = np.fromiter(
            sorted(spec.class_ids | {spec.void_id}), dtype=np.int64
        )
        if not np.isin(self.semantic, known).all():
            bad = np.setdiff1d(np.unique(self.semantic), known)
            raise ValidationError(f"unknown semantic ids {bad.tolist()}")
        thing_mask = self._thing_mask(spec)
        if (self.instance[thing_mask] < 1).any():
            raise ValidationError("thing pixels must carry instance id >= 1")
        if (self.instance[~thing_mask] != 0).any():
            raise ValidationError("stuff and void pixels must carry instance id 0")

    def _thing_mask(self, spec: LabelSpec) -> np.ndarray:
        things = np.fromiter(sorted(spec.thing_ids), dtype=np.int64)
        return np.isin(self.semantic, things)


@dataclass(frozen=True)
class DepthMap:
    """Per-pixel metric depth in meters; 0 marks missing pixels."""

    depth: np.ndarray

    def __post_init__(self):
        d = _freeze(self.depth, np.float64)
        if d.ndim != 2:
            raise DimensionError("depth raster must be 2-D")
        if d.size and not np.isfinite(d).all():
            raise ValidationError("depth values must be finite")
        if d.size and d.min() < 0:
            raise ValidationError("depth values must be >= 0 (0 marks missing)")
        object.__setattr__(self, "depth", d)

    @property
    def shape(self) -> tuple[int, int]:
        return self.depth.shape

    @property
    def valid(self) -> np.ndarray:
        """Boolean mask of pixels carrying a depth value."""
        return self.depth > 0


@dataclass(frozen=True)
class Tube:
    """All pixels of one (class, instance) region across a clip.

    Pixels are (frame, y, x) triples. Stuff tubes carry instance_id 0 and
    collect every pixel of their class in the clip.
    """

    class_id: int
    instance_id: int
    pixels: frozenset[tuple[int, int, int]]

    def __post_init__(self):
        object.__setattr__(self, "pixels", frozenset(self.pixels))
        if not self.pixels:
            raise ValidationError("tube must cover at least one pixel")

    @property
    def area(self) -> int:
        return len(self.pixels)


@dataclass(frozen=True)
class Sequence:
    """An ordered list of frames, each a panoptic raster with optional depth."""

    frames: tuple[tuple[PanopticMap, Optional[DepthMap]], ...]
    sequence_id: str = ""

    def __post_init__(self):
        frames = tuple((p, d) for p, d in self.frames)
        if not frames:
            raise ValidationError("sequence needs at least one frame")
        shape = frames[0][0].shape
        for i, (pano, depth) in enumerate(frames):
            if pano.shape != shape:
                raise DimensionError(f"frame {i} shape {pano.shape} != {shape}")
            if depth is not None and depth.shape != shape:
                raise DimensionError(f"frame {i} depth shape {depth.shape} != {shape}")
        object.__setattr__(self, "frames", frames)

    @classmethod
    def from_maps(
        cls,
        panoptics: SequenceT[PanopticMap],
        depths: Optional[SequenceT[Optional[DepthMap]]] = None,
        sequence_id: str = "",
    ) -> "Sequence":
        if depths is None:
            depths = [None] * len(panoptics)
        if len(depths) != len(panoptics):
            raise DimensionError("panoptic and depth lists differ in length")
        return cls(tuple(zip(panoptics, depths)), sequence_id=sequence_id)

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def panoptic_maps(self) -> tuple[PanopticMap, ...]:
        return tuple(p for p, _ in self.frames)

    @property
    def depth_maps(self) -> tuple[Optional[DepthMap], ...]:
        return tuple(d for _, d in self.frames)

    @property
    def shape(self) -> tuple[int, int]:
        return self.frames[0][0].shape


def concat_horizontal(maps: SequenceT[PanopticMap]) -> PanopticMap:
    """Concatenate panoptic rasters left to right.

    Pixel (y, x) of the j-th map lands at column x plus the total width of
    the maps before j; semantic and instance values are unchanged.
    """
    if not maps:
        raise ValidationError("cannot concatenate an empty list of maps")
    height = maps[0].height
    for m in maps:
        if m.height != height:
            raise DimensionError("all maps must share one height")
    if len(maps) == 1:
        return maps[0]
    sem = np.concatenate([m.semantic for m in maps], axis=1)
    inst = np.concatenate([m.instance for m in maps], axis=1)
    sem.setflags(write=False)
    inst.setflags(write=False)
    return PanopticMap(sem, inst)


def extract_tubes(clip: SequenceT[PanopticMap], spec: LabelSpec) -> list[Tube]:
    """Group the non-void pixels of a clip into tubes.

    Thing tubes are keyed by (class, instance id) across all frames; stuff
    tubes are keyed by class with instance id 0. The returned tubes partition
    the non-void pixels. A thing instance id appearing under two different
    classes within the clip is rejected, since the id would then not name a
    single object.
    """
    if not clip:
        raise ValidationError("clip must contain at least one frame")
    shape = clip[0].shape
    for m in clip:
        if m.shape != shape:
            raise DimensionError("clip frames must share dimensions")
        m.validate(spec)

    pixels: dict[tuple[int, int], list[tuple[int, int, int]]] = {}
    inst_class: dict[int, int] = {}
    for f, m in enumerate(clip):
        codes = m.composite()
        for code in np.unique(codes):
            sem = int(code) // INSTANCE_DIVISOR
            inst = int(code) % INSTANCE_DIVISOR
            if sem == spec.void_id:
                continue
            if inst > 0:
                seen = inst_class.setdefault(inst, sem)
                if seen != sem:
                    raise ValidationError(
                        f"instance id {inst} appears under classes {seen} and {sem}"
                    )
            ys, xs = np.nonzero(codes == code)
            pixels.setdefault((sem, inst), []).extend(
                (f, int(y), int(x)) for y, x in zip(ys, xs)
            )
    return [
        Tube(class_id=sem, instance_id=inst, pixels=frozenset(px))
        for (sem, inst), px in sorted(pixels.items())
    ]
