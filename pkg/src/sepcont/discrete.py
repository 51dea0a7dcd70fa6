"""Approximation engine for separately continuous functions with finite
discrete image.

From f it builds locally constant (hence jointly continuous) table
functions g_n and certifies layer-wise convergence through an explicit
finite stage: strips X(z,k) = {x : {x} x V_k inside f^-1(z)} computed as
exact clopen under-approximations at a working depth, patch regions
assembled from strips, and a per-neighbourhood certificate stage m with
exact membership verification from m on.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable

from sepcont.cantor import (
    ClopenSet,
    Cylinder,
    basis_cylinder,
    basis_index,
    partition_at_depth,
)
from sepcont.errors import RefinementExhaustedError, UnsupportedStructureError
from sepcont.functions import (
    SepFunction,
    SubbasicNbhd,
    TableFunction,
    in_subbasic,
)
from sepcont.groups import GroupElement

DEFAULT_DEPTH_CAP = 16


def depth_cap() -> int:
    return int(os.environ.get("SEPCONT_MAX_DEPTH", DEFAULT_DEPTH_CAP))


@dataclass(frozen=True)
class ImageFiltration:
    """Nondecreasing finite sets exhausting the declared image: level n is
    the first n+1-delay elements in canonical order (empty before delay)."""

    elements: tuple[GroupElement, ...]
    delay: int = 0

    @staticmethod
    def for_function(f: SepFunction, delay: int = 0) -> "ImageFiltration":
        return ImageFiltration(tuple(f.group.sort_canonically(f.declared_image())), delay)

    def level(self, n: int) -> tuple[GroupElement, ...]:
        return self.elements[: max(0, n + 1 - self.delay)]

    def entry_index(self, z: GroupElement) -> int:
        return self.elements.index(z) + self.delay

    def entry_index_of_set(self, values: Iterable[GroupElement]) -> int:
        return max((self.entry_index(z) for z in values), default=0)


@dataclass(frozen=True)
class StripSets:
    """x/y strips at scale k: clopen sets whose product with the k-th basis
    cylinder lies inside f^-1(z), certified structurally cell by cell."""

    z: GroupElement
    k: int
    x_strip: ClopenSet
    y_strip: ClopenSet


@dataclass(frozen=True)
class ClosedPatch:
    """Union of strip rectangles inside f^-1(z), assembled over k <= n."""

    z: GroupElement
    n: int
    rects: tuple[tuple[ClopenSet, ClopenSet], ...]

    def is_empty(self) -> bool:
        return not self.rects

    def meets_cell(self, u: Cylinder, v: Cylinder) -> bool:
        cu, cv = ClopenSet.from_cylinder(u), ClopenSet.from_cylinder(v)
        return any(
            not cu.intersect(a).is_empty() and not cv.intersect(b).is_empty()
            for a, b in self.rects
        )

    def covers_cell(self, u: Cylinder, v: Cylinder) -> bool:
        cu, cv = ClopenSet.from_cylinder(u), ClopenSet.from_cylinder(v)
        return any(cu.is_subset_of(a) and cv.is_subset_of(b) for a, b in self.rects)

    def intersects(self, other: "ClosedPatch") -> bool:
        return any(
            not a1.intersect(a2).is_empty() and not b1.intersect(b2).is_empty()
            for a1, b1 in self.rects
            for a2, b2 in other.rects
        )


def compute_strips(f: SepFunction, z: GroupElement, k: int, working_depth: int) -> StripSets:
    """Strips at working depth: a depth-D cell u joins X(z,k) iff f is
    certified constant z on u x V_k (never decided by sampling alone)."""
    v = basis_cylinder(k)
    x_cells, y_cells = [], []
    for u in partition_at_depth(working_depth):
        cx = f.constant_value_on(u, v)
        if cx == z:
            x_cells.append(u.prefix)
        cy = f.constant_value_on(v, u)
        if cy == z:
            y_cells.append(u.prefix)
    return StripSets(z, k, ClopenSet.from_prefixes(x_cells), ClopenSet.from_prefixes(y_cells))


def build_patch(f: SepFunction, z: GroupElement, n: int, strips: list[StripSets]) -> ClosedPatch:
    rects: list[tuple[ClopenSet, ClopenSet]] = []
    for s in strips:
        v = ClopenSet.from_cylinder(basis_cylinder(s.k))
        if not s.x_strip.is_empty():
            rects.append((s.x_strip, v))
        if not s.y_strip.is_empty():
            rects.append((v, s.y_strip))
    return ClosedPatch(z, n, tuple(rects))


@dataclass(frozen=True)
class ConvergenceCertificate:
    """Stage m plus the data behind it and the exact per-stage verification."""

    nbhd: SubbasicNbhd
    target_values: tuple[GroupElement, ...]
    cover_indices: dict[str, tuple[int, ...]]
    m: int
    checks: tuple[tuple[int, bool, str], ...]  # (n, member, witness text)
    passed: bool


class DiscreteApproximator:
    """Builds and caches the locally constant approximants of one function."""

    def __init__(self, f: SepFunction, filtration: ImageFiltration | None = None):
        if len(f.declared_image()) == 0:
            raise UnsupportedStructureError("function has empty declared image")
        self.f = f
        self.group = f.group
        self.filtration = filtration or ImageFiltration.for_function(f)
        self._strip_cache: dict[tuple[GroupElement, int, int], StripSets] = {}
        self._gn_cache: dict[int, TableFunction] = {}

    def working_depth(self, n: int) -> int:
        """Max basis-cylinder depth through index n (at least 1).

        At this depth every cell is contained in or disjoint from each strip
        rectangle, so a cell meets at most one patch; the patches are
        disjoint because f is single-valued.
        """
        d = max(1, max(basis_cylinder(k).depth() for k in range(n + 1)))
        if d > depth_cap():
            raise RefinementExhaustedError(
                f"working depth {d} exceeds cap {depth_cap()} (set SEPCONT_MAX_DEPTH to raise)"
            )
        return d

    def strips(self, z: GroupElement, k: int, working_depth: int) -> StripSets:
        key = (z, k, working_depth)
        if key not in self._strip_cache:
            self._strip_cache[key] = compute_strips(self.f, z, k, working_depth)
        return self._strip_cache[key]

    def patch(self, z: GroupElement, n: int) -> ClosedPatch:
        d = self.working_depth(n)
        return build_patch(self.f, z, n, [self.strips(z, k, d) for k in range(n + 1)])

    def approximant(self, n: int) -> TableFunction:
        """g_n: constant z on cells meeting the z-patch, f at the cell's
        limit representative elsewhere; locally constant by construction."""
        if n in self._gn_cache:
            return self._gn_cache[n]
        d = self.working_depth(n)
        patches = [
            (z, self.patch(z, n)) for z in self.filtration.level(n)
        ]
        patches = [(z, p) for z, p in patches if not p.is_empty()]
        cells = partition_at_depth(d)
        rows = []
        for u in cells:
            row = []
            for v in cells:
                hits = [z for z, p in patches if p.meets_cell(u, v)]
                if len(hits) > 1:
                    raise RefinementExhaustedError(
                        f"cell {u.prefix} x {v.prefix} meets patches of "
                        f"{[str(h) for h in hits]} at depth {d}"
                    )
                if hits:
                    row.append(hits[0])
                else:
                    row.append(self.f.eval(u.limit_representative(), v.limit_representative()))
            rows.append(tuple(row))
        g = TableFunction(d, tuple(rows))
        self._gn_cache[n] = g
        return g

    def target_values(self, nbhd: SubbasicNbhd) -> tuple[GroupElement, ...]:
        """W = f(K_X x K_Y), exact via the section partition on the singleton side."""
        axis = nbhd.singleton_axis()
        fixed = nbhd.kx if axis == "x" else nbhd.ky
        other = nbhd.ky if axis == "x" else nbhd.kx
        parts = self.f.section_partition(axis, fixed)  # type: ignore[arg-type]
        if isinstance(other, ClopenSet):
            vals = [z for z, pre in parts.items() if not other.intersect(pre).is_empty()]
        else:
            vals = [
                self.f.eval(fixed, other) if axis == "x" else self.f.eval(other, fixed)  # type: ignore[arg-type]
            ]
        return tuple(self.group.sort_canonically(set(vals)))

    def certificate(self, nbhd: SubbasicNbhd, n_max: int, grid_depth: int = 6) -> ConvergenceCertificate:
        """Stage recipe: per target value z, cover K ∩ section^-1(z) by basis
        cylinders inside the preimage; m caps the filtration entry of the
        target set and all cover indices; then verify membership exactly for
        every n in [m, n_max]."""
        axis = nbhd.singleton_axis()
        fixed = nbhd.kx if axis == "x" else nbhd.ky
        other = nbhd.ky if axis == "x" else nbhd.kx
        region = other if isinstance(other, ClopenSet) else None
        w = self.target_values(nbhd)
        cover: dict[str, tuple[int, ...]] = {}
        max_index = 0
        for z in w:
            pre = self.f.section_preimage(axis, fixed, z)  # type: ignore[arg-type]
            hit = region.intersect(pre) if region is not None else pre
            indices = tuple(sorted(basis_index(c.prefix) for c in hit.cylinders()))
            cover[str(z)] = indices
            if indices:
                max_index = max(max_index, indices[-1])
        m = max(self.filtration.entry_index_of_set(w), max_index)
        allowed = frozenset(w)
        checks = []
        passed = True
        for n in range(m, n_max + 1):
            probe = SubbasicNbhd(nbhd.kx, nbhd.ky, allowed, nbhd.probe_id)
            res = in_subbasic(self.approximant(n), probe, grid_depth)
            note = ""
            if not res.member:
                passed = False
                wx, wy, val = res.witness  # type: ignore[misc]
                note = f"({wx},{wy})->{val}"
            checks.append((n, res.member, note))
        return ConvergenceCertificate(nbhd, w, cover, m, tuple(checks), passed)

    def patch_soundness(self, n: int, grid_depth: int) -> bool:
        """Every grid point of every patch region evaluates to the patch value."""
        for z in self.filtration.level(n):
            patch = self.patch(z, n)
            for a, b in patch.rects:
                for cu in a.cells_at_depth(max(grid_depth, a.depth())):
                    for cv in b.cells_at_depth(max(grid_depth, b.depth())):
                        if self.f.eval(cu.representative(), cv.representative()) != z:
                            return False
        return True

    def patches_disjoint(self, n: int) -> bool:
        zs = self.filtration.level(n)
        patches = [self.patch(z, n) for z in zs]
        for i in range(len(patches)):
            for j in range(i + 1, len(patches)):
                if patches[i].intersects(patches[j]):
                    return False
        return True
