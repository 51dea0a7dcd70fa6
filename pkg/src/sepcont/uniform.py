"""Uniform-topology layer: membership in the four ball systems B_l, B_r,
B_lr, B_rl around a function, stage-schedule closure probes, and the
bounded-real candidate verifier.

Ball membership is decided on a grid with strict inequalities; the
two-sided system B_rl is decided by an exact search over enumerated
group elements at resolution eps/2, which is complete for the shipped
groups relative to the declared enumeration depth.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence

from sepcont.cantor import CantorPoint, ProbeGrid
from sepcont.functions import (
    SepFunction,
    SubbasicNbhd,
    separate_continuity_certificate,
    side_sample,
    uniform_dist,
)

Side = Literal["l", "r", "lr", "rl"]


@dataclass(frozen=True)
class BallQuery:
    center: SepFunction
    candidate: SepFunction
    side: Side
    eps: Fraction
    grid_depth: int = 4
    probe_id: str = ""

    def __post_init__(self) -> None:
        if self.eps <= 0:
            raise ValueError("ball radius must be positive")
        if self.side not in ("l", "r", "lr", "rl"):
            raise ValueError(f"unknown ball side {self.side!r}")


@dataclass(frozen=True)
class BallResult:
    query: BallQuery
    member: bool
    witness: tuple[CantorPoint, CantorPoint] | None


def _resolution_depth(group, eps: Fraction) -> int:
    exp = eps.denominator.bit_length() - 1
    return group.net_enumeration_depth(exp + 1, ())


def ball_membership(q: BallQuery) -> BallResult:
    """Grid decision of candidate in B_side[center, eps].

    l: d(1, f^-1 g) < eps everywhere; r: with g f^-1; lr: both; rl: some
    u, u' with d(1, u), d(1, u') < eps and g = u f u', searched exactly
    over enumerated elements at resolution eps/2.
    """
    group = q.center.group
    one = group.identity()
    points = ProbeGrid.at_depth(q.grid_depth).points
    if q.side == "rl":
        candidates = [
            u
            for u in group.dense_enumeration(_resolution_depth(group, q.eps))
            if group.dist(one, u) < q.eps
        ]
    for x in points:
        for y in points:
            fv, gv = q.center.eval(x, y), q.candidate.eval(x, y)
            if q.side in ("l", "lr"):
                if group.dist(one, group.mul(group.inv(fv), gv)) >= q.eps:
                    return BallResult(q, False, (x, y))
            if q.side in ("r", "lr"):
                if group.dist(one, group.mul(gv, group.inv(fv))) >= q.eps:
                    return BallResult(q, False, (x, y))
            if q.side == "rl":
                ok = False
                for u in candidates:
                    rest = group.mul(group.inv(group.mul(u, fv)), gv)
                    if group.dist(one, rest) < q.eps:
                        ok = True
                        break
                if not ok:
                    return BallResult(q, False, (x, y))
    return BallResult(q, True, None)


@dataclass(frozen=True)
class ClosureStageRow:
    stage: int
    eps: Fraction
    dist_l: Fraction
    dist_r: Fraction
    within: bool
    certified_stage: bool


@dataclass(frozen=True)
class ClosureReport:
    stages: tuple[ClosureStageRow, ...]
    failed_stage: int | None
    diagonal_passed: bool
    passed: bool


def closure_probe(
    f: SepFunction,
    stages: Sequence[SepFunction],
    schedule: Sequence[Fraction],
    probes: list[SubbasicNbhd],
    levels: list[int],
    grid_depth: int = 6,
    stage_certificates: Sequence[bool] | None = None,
) -> ClosureReport:
    """Empirical closure check: every stage must sit within its scheduled
    l- and r-uniform distance of f and carry a diagonal-limit certificate;
    then the factor/diagonal budget machinery is re-run on the stage
    sequence itself and must converge layer-wise on all probes.
    """
    if len(stages) != len(schedule):
        raise ValueError("one schedule radius per stage")
    certs = list(stage_certificates) if stage_certificates is not None else [True] * len(stages)
    rows = []
    failed: int | None = None
    for k, (g, eps) in enumerate(zip(stages, schedule)):
        dl = uniform_dist(f, g, "l", grid_depth).value
        dr = uniform_dist(f, g, "r", grid_depth).value
        within = dl <= eps and dr <= eps
        rows.append(ClosureStageRow(k, eps, dl, dr, within, certs[k]))
        if failed is None and not (within and certs[k]):
            failed = k
    if failed is not None:
        return ClosureReport(tuple(rows), failed, False, False)
    diag_ok = _stage_diagonal_check(f, stages, probes, levels, grid_depth)
    return ClosureReport(tuple(rows), None, diag_ok, diag_ok)


def _stage_diagonal_check(
    f: SepFunction,
    stages: Sequence[SepFunction],
    probes: list[SubbasicNbhd],
    levels: list[int],
    grid_depth: int,
) -> bool:
    """Layer-wise convergence of the stage sequence on every probe: for
    each requested level l there must be a stage from which the probe
    rectangle stays within 2^-l of f through the last stage."""
    for probe in probes:
        pairs = [
            (x, y)
            for x in side_sample(probe.kx, grid_depth)
            for y in side_sample(probe.ky, grid_depth)
        ]
        sups = [
            max((f.group.dist(f.eval(x, y), g.eval(x, y)) for x, y in pairs), default=Fraction(0))
            for g in stages
        ]
        for l in levels:
            tol = Fraction(1, 2**l)
            if not any(
                all(s <= tol for s in sups[m:]) for m in range(len(stages))
            ):
                return False
    return True


@dataclass(frozen=True)
class Problem3Report:
    sup_raw: Fraction
    bound: Fraction
    within: bool
    sup_group_metric: Fraction
    image_size: int
    image_zero_dim: str
    min_gap: Fraction | None
    witness: tuple[CantorPoint, CantorPoint] | None


def problem3_check(
    f: SepFunction,
    g: SepFunction,
    grid_depth: int = 5,
    bound: Fraction = Fraction(1),
) -> Problem3Report:
    """Bounded-real candidate check: raw |f - g| on the grid against the
    bound, plus zero-dimensionality evidence for g's image (finite image
    is certified; anything else is reported as sample-level gap structure,
    never certified)."""
    from sepcont.groups import RealBoundedGroup

    if not isinstance(f.group, RealBoundedGroup):
        raise ValueError("candidate verifier runs over the bounded-real group")
    probe_pts = ProbeGrid.at_depth(min(grid_depth, 3)).points
    if not separate_continuity_certificate(g, probe_pts):
        raise ValueError("candidate lacks a separate-continuity certificate")
    points = ProbeGrid.at_depth(grid_depth).points
    sup_raw = Fraction(0)
    sup_metric = Fraction(0)
    witness = None
    for x in points:
        for y in points:
            raw = abs(f.eval(x, y).payload - g.eval(x, y).payload)
            if raw > sup_raw:
                sup_raw, witness = raw, (x, y)
            sup_metric = max(sup_metric, f.group.dist(f.eval(x, y), g.eval(x, y)))
    image = g.declared_image()
    values = sorted(z.payload for z in image)
    gaps = [b - a for a, b in zip(values, values[1:]) if b != a]
    return Problem3Report(
        sup_raw=sup_raw,
        bound=bound,
        within=sup_raw <= bound,
        sup_group_metric=sup_metric,
        image_size=len(image),
        image_zero_dim="certified-finite",
        min_gap=min(gaps) if gaps else None,
        witness=None if sup_raw <= bound else witness,
    )
