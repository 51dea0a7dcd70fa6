"""Approximation engine for zero-dimensional image: quantizer tower over
refining image covers, factor functions with net-valued image, per-factor
delegation to the discrete engine, and the diagonal sequence with its
exact error budget.

Conventions (recorded in every run manifest): cover level n has cell
diameter <= 2^-(n+1); net(k) is the greedy maximal 2^-(k+2)-separated
subset of B[2^-k]; the quantizer step n -> n+1 draws its increment from
net(n).  The quantizer conditions certified per level n are

* (1) the quantizer is constant on each cover cell (by representation);
* (2) sup over the image sample of d(r_n(z), z) <= 2^-n, exactly;
* (3) r_n(z) lies in r_{n-1}(z) * net(n-1) for every sampled z, exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Literal

from sepcont.cantor import CantorPoint, ProbeGrid
from sepcont.errors import (
    CoverConstructionError,
    NetMaximalityError,
    QuantizerConditionError,
)
from sepcont.functions import (
    DistResult,
    PointwiseInverse,
    PointwiseProduct,
    PostCompose,
    SepFunction,
    SubbasicNbhd,
    grid_image,
    product_chain,
    side_sample,
)
from sepcont.discrete import DiscreteApproximator, ImageFiltration
from sepcont.groups import GroupElement, GroupSpec, SeparatedNet, ball_net


@dataclass(frozen=True)
class ImageCover:
    """Disjoint partition of the image sample into cells of diameter <= 2^-(level+1)."""

    level: int
    cells: tuple[tuple[GroupElement, ...], ...]

    def cell_index_of(self, z: GroupElement) -> int:
        for i, cell in enumerate(self.cells):
            if z in cell:
                return i
        raise KeyError(f"{z} not in any cover cell")

    def diameter_bound(self) -> Fraction:
        return Fraction(1, 2 ** (self.level + 1))

    def max_cell_diameter(self, group: GroupSpec) -> Fraction:
        worst = Fraction(0)
        for cell in self.cells:
            for i in range(len(cell)):
                for j in range(i + 1, len(cell)):
                    worst = max(worst, group.dist(cell[i], cell[j]))
        return worst

    def refines(self, coarser: "ImageCover") -> bool:
        for cell in self.cells:
            parents = {coarser.cell_index_of(z) for z in cell}
            if len(parents) != 1:
                return False
        return True


def _sorted_cells(group: GroupSpec, cells: Iterable[Iterable[GroupElement]]):
    inner = [tuple(group.sort_canonically(c)) for c in cells]
    return tuple(sorted(inner, key=lambda c: group.canonical_key(c[0])))


def _greedy_split(group: GroupSpec, elements, bound: Fraction):
    cells: list[list[GroupElement]] = []
    for z in elements:
        for cell in cells:
            if all(group.dist(z, w) <= bound for w in cell):
                cell.append(z)
                break
        else:
            cells.append([z])
    return cells


def build_covers(group: GroupSpec, sample: tuple[GroupElement, ...], levels: int) -> list[ImageCover]:
    """Covers for levels 0..levels; level 0 is the single whole-sample cell
    (valid because the metric is bounded by 1/2).  Structural prefix classes
    are used when the group provides them; otherwise each cell of the
    previous level is split greedily, which makes refinement automatic."""
    sample = tuple(group.sort_canonically(sample))
    if not sample:
        raise CoverConstructionError("empty image sample")
    covers = [ImageCover(0, (sample,))]
    structural = group.cover_key(sample[0], 0) is not None
    for n in range(1, levels + 1):
        bound = Fraction(1, 2 ** (n + 1))
        if structural:
            by_key: dict[object, list[GroupElement]] = {}
            for z in sample:
                by_key.setdefault(group.cover_key(z, n), []).append(z)
            cells = _sorted_cells(group, by_key.values())
        else:
            split: list[list[GroupElement]] = []
            for prev_cell in covers[n - 1].cells:
                split.extend(_greedy_split(group, prev_cell, bound))
            cells = _sorted_cells(group, split)
        cover = ImageCover(n, cells)
        if cover.max_cell_diameter(group) > bound:
            raise CoverConstructionError(
                f"cover level {n}: cell diameter exceeds {bound}"
            )
        if not cover.refines(covers[n - 1]):
            raise CoverConstructionError(f"cover level {n} does not refine level {n - 1}")
        covers.append(cover)
    return covers


@dataclass(frozen=True)
class Quantizer:
    """Locally constant map on the image sample: one value per cover cell."""

    level: int
    cover: ImageCover
    values: tuple[GroupElement, ...]

    def apply(self, z: GroupElement) -> GroupElement:
        return self.values[self.cover.cell_index_of(z)]

    def mapping(self, domain: Iterable[GroupElement]) -> dict[GroupElement, GroupElement]:
        """Point map over ``domain``; elements outside the sample map to themselves
        (only reachable in grid-sampled mode, reported by the pipeline)."""
        out = {}
        sampled = {z for cell in self.cover.cells for z in cell}
        for z in domain:
            out[z] = self.apply(z) if z in sampled else z
        return out


def build_quantizer_tower(
    group: GroupSpec,
    sample: tuple[GroupElement, ...],
    covers: list[ImageCover],
    nets: list[SeparatedNet],
) -> list[Quantizer]:
    """Inductive construction: r_0 is identically the group identity; the
    step n -> n+1 picks, per child cell, the canonical-first sample point
    z', checks g_W^-1 z' lands in B[2^-n], and multiplies g_W by the nearest
    net(n) element (ties by canonical order, required distance < 2^-(n+2))."""
    one = group.identity()
    tower = [Quantizer(0, covers[0], (one,) * len(covers[0].cells))]
    for n in range(len(covers) - 1):
        prev = tower[n]
        child = covers[n + 1]
        values = []
        for cell in child.cells:
            z_child = cell[0]
            g_w = prev.values[covers[n].cell_index_of(z_child)]
            shifted = group.mul(group.inv(g_w), z_child)
            if group.dist(one, shifted) > Fraction(1, 2**n):
                raise QuantizerConditionError(
                    f"step {n}: shifted cell point outside B[2^-{n}]"
                )
            eps, d = nets[n].nearest(shifted)
            if d >= Fraction(1, 2 ** (n + 2)):
                raise NetMaximalityError(
                    f"step {n}: nearest net element at distance {d} >= 2^-{n + 2}; "
                    f"enumeration depth {nets[n].enumeration_depth} too small"
                )
            values.append(group.mul(g_w, eps))
        tower.append(Quantizer(n + 1, child, tuple(values)))
    return tower


@dataclass(frozen=True)
class ConditionRow:
    level: int
    cond1: bool
    cond2_sup: Fraction
    cond2_bound: Fraction
    cond2_ok: bool
    cond3: bool


def quantizer_conditions(
    group: GroupSpec,
    sample: tuple[GroupElement, ...],
    tower: list[Quantizer],
    nets: list[SeparatedNet],
) -> list[ConditionRow]:
    rows = []
    for n, q in enumerate(tower):
        cond1 = True  # one stored value per cell: constant by representation
        sup = max((group.dist(q.apply(z), z) for z in sample), default=Fraction(0))
        bound = Fraction(1, 2**n)
        cond3 = True
        if n >= 1:
            prev = tower[n - 1]
            net_elements = set(nets[n - 1].elements)
            for z in sample:
                eps = group.mul(group.inv(prev.apply(z)), q.apply(z))
                if eps not in net_elements:
                    cond3 = False
                    break
        rows.append(ConditionRow(n, cond1, sup, bound, sup <= bound, cond3))
    return rows


@dataclass(frozen=True)
class DiagonalLevelResult:
    level_l: int
    probe_id: str
    m_l: int | None
    layer_ok: bool
    final_sup: Fraction
    budget: Fraction
    final_ok: bool
    tail_ok: bool
    witness: str


@dataclass(frozen=True)
class DiagonalReport:
    results: tuple[DiagonalLevelResult, ...]
    stage_sups: tuple[tuple[int, Fraction], ...]
    stage_of_level: dict[int, int | None]
    passed: bool


class ZerodimPipeline:
    """End-to-end construction for one function: sample, covers, nets,
    quantizer tower, factors, and the diagonal sequence."""

    def __init__(
        self,
        f: SepFunction,
        n_max: int,
        grid_depth: int = 6,
        sample_source: Literal["declared", "grid"] = "declared",
    ):
        self.f = f
        self.group = f.group
        self.n_max = n_max
        self.grid_depth = grid_depth
        self.sample_source = sample_source
        declared = tuple(self.group.sort_canonically(f.declared_image()))
        if sample_source == "grid":
            self.sample = grid_image(f, grid_depth)
        else:
            self.sample = declared
        self.sample_complete = set(self.sample) >= set(declared)
        levels = n_max + 1
        self.covers = build_covers(self.group, self.sample, levels)
        self.nets = [
            ball_net(self.group, k, self.group.net_enumeration_depth(k, self.sample))
            for k in range(levels)
        ]
        self.tower = build_quantizer_tower(self.group, self.sample, self.covers, self.nets)
        self._factor_cache: dict[int, SepFunction] = {}
        self._approx_cache: dict[int, DiscreteApproximator] = {}

    def condition_rows(self) -> list[ConditionRow]:
        return quantizer_conditions(self.group, self.sample, self.tower, self.nets)

    def quantized(self, n: int) -> SepFunction:
        """f_n = r_n o f."""
        mapping = self.tower[n].mapping(self.f.declared_image())
        return PostCompose(self.f, mapping, label=f"r{n}")

    def factor(self, n: int) -> SepFunction:
        """g_n = f_n^-1 * f_{n+1}, with image inside net(n) by construction."""
        if n not in self._factor_cache:
            f_n, f_n1 = self.quantized(n), self.quantized(n + 1)
            override = tuple(
                self.group.sort_canonically(
                    {
                        self.group.mul(self.group.inv(self.tower[n].apply(z)), self.tower[n + 1].apply(z))
                        for z in self.sample
                    }
                )
            )
            self._factor_cache[n] = PointwiseProduct(
                PointwiseInverse(f_n), f_n1, image_override=override
            )
        return self._factor_cache[n]

    def factors(self) -> list[SepFunction]:
        return [self.factor(n) for n in range(self.n_max + 1)]

    def uniform_rate(self, n: int) -> DistResult:
        """Grid sup of d(f_n, f); bounded by 2^-n through condition (2)."""
        from sepcont.functions import uniform_dist

        return uniform_dist(self.quantized(n), self.f, "l", self.grid_depth)

    def factor_values_on_grid(self, n: int) -> set[GroupElement]:
        g = self.factor(n)
        pts = ProbeGrid.at_depth(self.grid_depth).points
        return {g.eval(x, y) for x in pts for y in pts}

    def factor_discreteness(self, n: int) -> bool:
        return self.factor_values_on_grid(n) <= set(self.nets[n].elements)

    def telescoping_ok(self, grid_depth: int | None = None) -> bool:
        """g_0 g_1 ... g_n == f_{n+1} pointwise on the grid, exactly."""
        d = grid_depth if grid_depth is not None else min(self.grid_depth, 4)
        pts = ProbeGrid.at_depth(d).points
        for n in range(self.n_max + 1):
            prod = product_chain([self.factor(k) for k in range(n + 1)])
            f_next = self.quantized(n + 1)
            for x in pts:
                for y in pts:
                    if prod.eval(x, y) != f_next.eval(x, y):
                        return False
        return True

    def factor_approximator(self, k: int) -> DiscreteApproximator:
        if k not in self._approx_cache:
            self._approx_cache[k] = DiscreteApproximator(
                self.factor(k), ImageFiltration.for_function(self.factor(k))
            )
        return self._approx_cache[k]

    def stage_function(self, n: int, m: int) -> SepFunction:
        """f_{n,m} = g_{0,m} * ... * g_{n,m} (each factor's stage-m approximant)."""
        return product_chain([self.factor_approximator(k).approximant(m) for k in range(n + 1)])

    def diagonal(
        self,
        probes: list[SubbasicNbhd],
        levels: list[int],
    ) -> DiagonalReport:
        """Diagonal budget: per level l and probe, find the first stage m(l)
        from which the partial product f_{l,n} stays within 2^-l of its limit
        g_0...g_l = f_{l+1} on the probe rectangle, then certify
        d(f, f_{n,n}) < 2^-(l-2) there for n >= m(l), and the tail-product
        containment in B[2^-l] at every grid point."""
        n_max = self.n_max
        results = []
        stage_of_level: dict[int, int | None] = {}
        grid_pts = ProbeGrid.at_depth(self.grid_depth).points
        diagonals = [self.stage_function(n, n) for n in range(n_max + 1)]
        for l in levels:
            if l + 1 > self.n_max + 1:
                raise ValueError(f"level {l} needs factors up to {l}; raise n_max")
            target = self.quantized(l + 1)
            tol = Fraction(1, 2**l)
            budget = Fraction(4, 2**l)
            level_stage: int | None = None
            for probe in probes:
                pairs = _rect_pairs(probe, self.grid_depth)
                sup_at = {}
                for n in range(l, n_max + 1):
                    f_ln = self.stage_function(l, n)
                    sup_at[n] = max(
                        (self.group.dist(f_ln.eval(x, y), target.eval(x, y)) for x, y in pairs),
                        default=Fraction(0),
                    )
                m_l = None
                for m in range(l, n_max + 1):
                    if all(sup_at[n] <= tol for n in range(m, n_max + 1)):
                        m_l = m
                        break
                witness = ""
                final_sup = Fraction(0)
                final_ok = tail_ok = False
                if m_l is not None:
                    final_ok = True
                    for n in range(m_l, n_max + 1):
                        for x, y in pairs:
                            d = self.group.dist(self.f.eval(x, y), diagonals[n].eval(x, y))
                            if d > final_sup:
                                final_sup = d
                            if d >= budget:
                                final_ok = False
                                witness = f"n={n} ({x},{y})"
                    tail_ok = self._tail_containment(l, max(m_l, l + 1), grid_pts)
                    level_stage = m_l if level_stage is None else max(level_stage, m_l)
                results.append(
                    DiagonalLevelResult(
                        l, probe.probe_id, m_l, m_l is not None, final_sup, budget,
                        final_ok, tail_ok, witness,
                    )
                )
            stage_of_level[l] = level_stage
        stage_sups = []
        for n in range(n_max + 1):
            sup = Fraction(0)
            for x in grid_pts:
                for y in grid_pts:
                    sup = max(sup, self.group.dist(self.f.eval(x, y), diagonals[n].eval(x, y)))
            for probe in probes:
                for x, y in _rect_pairs(probe, self.grid_depth):
                    sup = max(sup, self.group.dist(self.f.eval(x, y), diagonals[n].eval(x, y)))
            stage_sups.append((n, sup))
        passed = all(r.layer_ok and r.final_ok and r.tail_ok for r in results)
        return DiagonalReport(tuple(results), tuple(stage_sups), stage_of_level, passed)

    def _tail_containment(self, l: int, start: int, grid_pts) -> bool:
        """prod_{k=l+1..n} g_{k,n}(p) stays in B[2^-l] at every grid point, exactly."""
        one = self.group.identity()
        tol = Fraction(1, 2**l)
        for n in range(start, self.n_max + 1):
            if n < l + 1:
                continue
            stages = [self.factor_approximator(k).approximant(n) for k in range(l + 1, n + 1)]
            for x in grid_pts:
                for y in grid_pts:
                    acc = one
                    for g in stages:
                        acc = self.group.mul(acc, g.eval(x, y))
                    if self.group.dist(one, acc) > tol:
                        return False
        return True


def _rect_pairs(nbhd: SubbasicNbhd, grid_depth: int) -> list[tuple[CantorPoint, CantorPoint]]:
    xs = side_sample(nbhd.kx, grid_depth)
    ys = side_sample(nbhd.ky, grid_depth)
    return [(x, y) for x in xs for y in ys]
