"""Separately continuous functions on Cantor x Cantor as combinator trees.

Every combinator evaluates exactly at eventually periodic points and
answers structural queries:

* ``section_preimage`` — the exact clopen set on which a fixed-coordinate
  section takes a given value; for finite-image functions the preimages
  over the declared image partition the space, which is the executable
  form of separate continuity.
* ``values_on_rect`` — a finite superset of the values on a rectangle of
  cylinders, flagged exact when the structure certifies it.  A singleton
  superset certifies constancy on the rectangle even when inexact.
* ``postcomposition`` — rewrites the tree as (base function, finite map)
  when possible, so products of quantized copies of one base stay exact.

Also houses the subbasic neighbourhoods [K_X x K_Y, U] (one side a
singleton) and the grid-based layer-wise / uniform distances.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Literal

from sepcont.cantor import CantorPoint, ClopenSet, Cylinder, ProbeGrid
from sepcont.errors import UnsupportedStructureError
from sepcont.groups import GroupElement, GroupSpec

Axis = Literal["x", "y"]

_WHOLE = Cylinder("")


class SepFunction:
    """Base class; subclasses are immutable combinators sharing one group."""

    group: GroupSpec

    def eval(self, x: CantorPoint, y: CantorPoint) -> GroupElement:
        raise NotImplementedError

    def declared_image(self) -> tuple[GroupElement, ...]:
        """Finite list of elements the function is guaranteed to land in."""
        raise NotImplementedError

    def section_preimage(self, axis: Axis, fixed: CantorPoint, z: GroupElement) -> ClopenSet:
        """Exact clopen {t : f(fixed, t) = z} (axis 'x' fixes x and varies y)."""
        raise NotImplementedError

    def values_on_rect(self, u: Cylinder, v: Cylinder) -> tuple[frozenset[GroupElement], bool]:
        """Superset of the values on u x v, plus an exactness flag."""
        raise NotImplementedError

    def constant_value_on(self, u: Cylinder, v: Cylinder) -> GroupElement | None:
        """The certified constant value of f on u x v, or None.

        Rectangles are nonempty, so a singleton value superset certifies
        constancy regardless of the exactness flag.
        """
        values, _ = self.values_on_rect(u, v)
        if len(values) == 1:
            return next(iter(values))
        return None

    def locally_constant_depth(self) -> int | None:
        """A depth d such that f is constant on every d-cell rectangle, or None."""
        raise NotImplementedError

    def postcomposition(self) -> tuple["SepFunction", dict[GroupElement, GroupElement]] | None:
        """(base, map) with self == map o base, when the structure provides one."""
        return None

    def section_partition(self, axis: Axis, fixed: CantorPoint) -> dict[GroupElement, ClopenSet]:
        """Nonempty section preimages over the declared image."""
        out: dict[GroupElement, ClopenSet] = {}
        for z in self.declared_image():
            pre = self.section_preimage(axis, fixed, z)
            if not pre.is_empty():
                out[z] = out[z].union(pre) if z in out else pre
        return out

    def section_depth(self, axis: Axis, fixed: CantorPoint) -> int:
        return max((s.depth() for s in self.section_partition(axis, fixed).values()), default=0)


def _dedupe(elements: Iterable[GroupElement]) -> tuple[GroupElement, ...]:
    seen: dict[GroupElement, None] = {}
    for e in elements:
        seen.setdefault(e)
    group = next(iter(seen)).group
    return tuple(group.sort_canonically(seen))


@dataclass(frozen=True)
class Constant(SepFunction):
    value: GroupElement

    @property
    def group(self) -> GroupSpec:
        return self.value.group

    def eval(self, x: CantorPoint, y: CantorPoint) -> GroupElement:
        return self.value

    def declared_image(self) -> tuple[GroupElement, ...]:
        return (self.value,)

    def section_preimage(self, axis: Axis, fixed: CantorPoint, z: GroupElement) -> ClopenSet:
        return ClopenSet.whole() if z == self.value else ClopenSet.empty()

    def values_on_rect(self, u, v):
        return frozenset((self.value,)), True

    def locally_constant_depth(self) -> int | None:
        return 0


@dataclass(frozen=True)
class TableFunction(SepFunction):
    """Value depends only on the first ``depth`` bits of each coordinate."""

    depth: int
    values: tuple[tuple[GroupElement, ...], ...]

    def __post_init__(self) -> None:
        n = 2**self.depth
        if len(self.values) != n or any(len(row) != n for row in self.values):
            raise ValueError(f"table must be {n} x {n}")

    @property
    def group(self) -> GroupSpec:
        return self.values[0][0].group

    def _index(self, p: CantorPoint) -> int:
        return int(p.prefix(self.depth), 2) if self.depth else 0

    def _rows_for(self, c: Cylinder) -> range:
        if len(c.prefix) >= self.depth:
            i = int(c.prefix[: self.depth], 2) if self.depth else 0
            return range(i, i + 1)
        pad = self.depth - len(c.prefix)
        base = int(c.prefix, 2) << pad if c.prefix else 0
        return range(base, base + 2**pad)

    def eval(self, x: CantorPoint, y: CantorPoint) -> GroupElement:
        return self.values[self._index(x)][self._index(y)]

    def declared_image(self) -> tuple[GroupElement, ...]:
        return _dedupe(v for row in self.values for v in row)

    def section_preimage(self, axis: Axis, fixed: CantorPoint, z: GroupElement) -> ClopenSet:
        i = self._index(fixed)
        line = [self.values[i][j] for j in range(2**self.depth)] if axis == "x" else [
            self.values[j][i] for j in range(2**self.depth)
        ]
        prefixes = [
            format(j, f"0{self.depth}b") if self.depth else ""
            for j, val in enumerate(line)
            if val == z
        ]
        return ClopenSet.from_prefixes(prefixes)

    def values_on_rect(self, u, v):
        vals = frozenset(
            self.values[i][j] for i in self._rows_for(u) for j in self._rows_for(v)
        )
        return vals, True

    def locally_constant_depth(self) -> int | None:
        return self.depth


@dataclass(frozen=True)
class _Profile:
    """Which family locations a cylinder can hit: finitely many indices,
    every index from ``tail_from`` on, and/or a point outside all members."""

    indices: frozenset[int] = frozenset()
    tail_from: int | None = None
    out: bool = False

    def single_finite(self) -> int | None:
        if self.tail_from is None and not self.out and len(self.indices) == 1:
            return next(iter(self.indices))
        return None


class CylinderFamily:
    """A (possibly infinite) family of pairwise disjoint cylinders with values."""

    group: GroupSpec

    def locate(self, p: CantorPoint) -> tuple[int, GroupElement] | None:
        raise NotImplementedError

    def member_set(self, n: int) -> ClopenSet:
        raise NotImplementedError

    def value_at(self, n: int) -> GroupElement:
        raise NotImplementedError

    def all_values(self) -> tuple[GroupElement, ...]:
        raise NotImplementedError

    def profile(self, c: Cylinder) -> _Profile:
        raise NotImplementedError

    def tail_values(self, start: int) -> frozenset[GroupElement]:
        raise NotImplementedError

    def max_depth(self) -> int | None:
        raise NotImplementedError


@dataclass(frozen=True)
class OnesThenZeroFamily(CylinderFamily):
    """The cylinders [1^n 0] for every n, accumulating at the all-ones point.

    ``values[n]`` cycles when ``cycle`` is set; otherwise indices past the
    list take the identity, which collapses the family to a finite one.
    """

    values: tuple[GroupElement, ...]
    cycle: bool = True

    def __post_init__(self) -> None:
        if not self.values:
            raise ValueError("value schedule must be nonempty")

    @property
    def group(self) -> GroupSpec:
        return self.values[0].group

    def locate(self, p: CantorPoint) -> tuple[int, GroupElement] | None:
        n = p.leading_ones()
        if n is None:
            return None
        return n, self.value_at(n)

    def member_set(self, n: int) -> ClopenSet:
        return ClopenSet.from_prefixes(["1" * n + "0"])

    def value_at(self, n: int) -> GroupElement:
        if self.cycle:
            return self.values[n % len(self.values)]
        return self.values[n] if n < len(self.values) else self.group.identity()

    def all_values(self) -> tuple[GroupElement, ...]:
        return _dedupe(self.values)

    def profile(self, c: Cylinder) -> _Profile:
        ones = 0
        for ch in c.prefix:
            if ch == "1":
                ones += 1
            else:
                return _Profile(indices=frozenset((ones,)))
        return _Profile(tail_from=ones, out=True)

    def tail_values(self, start: int) -> frozenset[GroupElement]:
        if self.cycle:
            return frozenset(self.values)
        vals = set(self.values[start:])
        vals.add(self.group.identity())
        return frozenset(vals)

    def max_depth(self) -> int | None:
        if not self.cycle:
            return len(self.values) + 1
        if set(self.values) == {self.group.identity()}:
            return 0
        return None


@dataclass(frozen=True)
class FiniteCylinderFamily(CylinderFamily):
    members: tuple[tuple[Cylinder, GroupElement], ...]

    def __post_init__(self) -> None:
        cyls = [c for c, _ in self.members]
        for i in range(len(cyls)):
            for j in range(i + 1, len(cyls)):
                if cyls[i].overlaps(cyls[j]):
                    raise ValueError(
                        f"family cylinders must be pairwise disjoint: "
                        f"{cyls[i].prefix!r} overlaps {cyls[j].prefix!r}"
                    )

    @property
    def group(self) -> GroupSpec:
        return self.members[0][1].group

    def locate(self, p: CantorPoint) -> tuple[int, GroupElement] | None:
        for n, (c, val) in enumerate(self.members):
            if c.contains(p):
                return n, val
        return None

    def member_set(self, n: int) -> ClopenSet:
        return ClopenSet.from_cylinder(self.members[n][0])

    def value_at(self, n: int) -> GroupElement:
        return self.members[n][1]

    def all_values(self) -> tuple[GroupElement, ...]:
        return _dedupe(val for _, val in self.members)

    def profile(self, c: Cylinder) -> _Profile:
        hit = frozenset(n for n, (m, _) in enumerate(self.members) if m.overlaps(c))
        union = ClopenSet.from_prefixes([m.prefix for m, _ in self.members])
        out = not ClopenSet.from_cylinder(c).is_subset_of(union)
        return _Profile(indices=hit, out=out)

    def tail_values(self, start: int) -> frozenset[GroupElement]:
        return frozenset(val for n, (_, val) in enumerate(self.members) if n >= start)

    def max_depth(self) -> int | None:
        return max((c.depth() for c, _ in self.members), default=0) + 1 if self.members else 0


@dataclass(frozen=True)
class DiagonalIndicator(SepFunction):
    """f(x, y) = family value at n when both x and y lie in member n, else identity.

    Each section is locally constant because the members are pairwise
    disjoint clopen sets; with the infinite ones-then-zero schema and a
    non-identity value schedule the function is jointly discontinuous at
    the all-ones diagonal point.
    """

    family: CylinderFamily

    @property
    def group(self) -> GroupSpec:
        return self.family.group

    @staticmethod
    def ones_schema(values: Iterable[GroupElement], cycle: bool = True) -> "DiagonalIndicator":
        return DiagonalIndicator(OnesThenZeroFamily(tuple(values), cycle))

    @staticmethod
    def from_pairs(pairs: Iterable[tuple[Cylinder, GroupElement]]) -> "DiagonalIndicator":
        return DiagonalIndicator(FiniteCylinderFamily(tuple(pairs)))

    def eval(self, x: CantorPoint, y: CantorPoint) -> GroupElement:
        lx, ly = self.family.locate(x), self.family.locate(y)
        if lx is not None and ly is not None and lx[0] == ly[0]:
            return lx[1]
        return self.group.identity()

    def declared_image(self) -> tuple[GroupElement, ...]:
        return _dedupe((self.group.identity(), *self.family.all_values()))

    def section_preimage(self, axis: Axis, fixed: CantorPoint, z: GroupElement) -> ClopenSet:
        identity = self.group.identity()
        loc = self.family.locate(fixed)
        if loc is None:
            return ClopenSet.whole() if z == identity else ClopenSet.empty()
        n, val = loc
        member = self.family.member_set(n)
        if val == identity:
            return ClopenSet.whole() if z == identity else ClopenSet.empty()
        if z == val:
            return member
        if z == identity:
            return member.complement()
        return ClopenSet.empty()

    def values_on_rect(self, u, v):
        pu, pv = self.family.profile(u), self.family.profile(v)
        identity = self.group.identity()
        matched: set[GroupElement] = set()
        matched.update(self.family.value_at(n) for n in pu.indices & pv.indices)
        if pv.tail_from is not None:
            matched.update(self.family.value_at(n) for n in pu.indices if n >= pv.tail_from)
        if pu.tail_from is not None:
            matched.update(self.family.value_at(n) for n in pv.indices if n >= pu.tail_from)
        if pu.tail_from is not None and pv.tail_from is not None:
            matched.update(self.family.tail_values(max(pu.tail_from, pv.tail_from)))
        su, sv = pu.single_finite(), pv.single_finite()
        if not (su is not None and sv is not None and su == sv):
            matched.add(identity)
        return frozenset(matched), True

    def locally_constant_depth(self) -> int | None:
        return self.family.max_depth()


@dataclass(frozen=True, eq=False)
class PostCompose(SepFunction):
    """mapping o inner, for a finite map defined on the inner declared image."""

    inner: SepFunction
    mapping: dict[GroupElement, GroupElement]
    label: str = "map"

    def __post_init__(self) -> None:
        missing = [z for z in self.inner.declared_image() if z not in self.mapping]
        if missing:
            raise UnsupportedStructureError(
                f"mapping {self.label!r} undefined on {[str(z) for z in missing]}"
            )

    @property
    def group(self) -> GroupSpec:
        return self.inner.group

    def eval(self, x: CantorPoint, y: CantorPoint) -> GroupElement:
        return self.mapping[self.inner.eval(x, y)]

    def declared_image(self) -> tuple[GroupElement, ...]:
        return _dedupe(self.mapping[z] for z in self.inner.declared_image())

    def section_preimage(self, axis: Axis, fixed: CantorPoint, z: GroupElement) -> ClopenSet:
        out = ClopenSet.empty()
        for w in self.inner.declared_image():
            if self.mapping[w] == z:
                out = out.union(self.inner.section_preimage(axis, fixed, w))
        return out

    def values_on_rect(self, u, v):
        inner_vals, exact = self.inner.values_on_rect(u, v)
        # Over-approximations may stray outside the inner declared image;
        # actual values never do, so unmapped strays can be dropped.
        return frozenset(self.mapping[w] for w in inner_vals if w in self.mapping), exact

    def locally_constant_depth(self) -> int | None:
        return self.inner.locally_constant_depth()

    def postcomposition(self):
        deeper = self.inner.postcomposition()
        if deeper is not None:
            base, inner_map = deeper
            return base, {z: self.mapping[w] for z, w in inner_map.items()}
        return self.inner, dict(self.mapping)


@dataclass(frozen=True)
class PointwiseInverse(SepFunction):
    inner: SepFunction

    @property
    def group(self) -> GroupSpec:
        return self.inner.group

    def eval(self, x: CantorPoint, y: CantorPoint) -> GroupElement:
        return self.group.inv(self.inner.eval(x, y))

    def declared_image(self) -> tuple[GroupElement, ...]:
        return _dedupe(self.group.inv(z) for z in self.inner.declared_image())

    def section_preimage(self, axis: Axis, fixed: CantorPoint, z: GroupElement) -> ClopenSet:
        return self.inner.section_preimage(axis, fixed, self.group.inv(z))

    def values_on_rect(self, u, v):
        vals, exact = self.inner.values_on_rect(u, v)
        return frozenset(self.group.inv(w) for w in vals), exact

    def locally_constant_depth(self) -> int | None:
        return self.inner.locally_constant_depth()

    def postcomposition(self):
        deeper = self.inner.postcomposition()
        if deeper is not None:
            base, inner_map = deeper
            return base, {z: self.group.inv(w) for z, w in inner_map.items()}
        return self.inner, {z: self.group.inv(z) for z in self.inner.declared_image()}


def _map_over(fn: SepFunction, base: SepFunction) -> dict[GroupElement, GroupElement] | None:
    """Express fn as a finite map over base's declared image, or None."""
    if fn is base:
        return {z: z for z in base.declared_image()}
    if isinstance(fn, Constant):
        return {z: fn.value for z in base.declared_image()}
    pc = fn.postcomposition()
    if pc is not None and pc[0] is base:
        return pc[1]
    return None


@dataclass(frozen=True)
class PointwiseProduct(SepFunction):
    """(x, y) -> left(x, y) * right(x, y).

    ``image_override`` narrows the declared image when the construction
    guarantees correlated factors (e.g. both are maps of one base); it is
    revalidated against grid sampling by the pipelines that use it.
    """

    left: SepFunction
    right: SepFunction
    image_override: tuple[GroupElement, ...] | None = None

    @property
    def group(self) -> GroupSpec:
        return self.left.group

    def eval(self, x: CantorPoint, y: CantorPoint) -> GroupElement:
        return self.group.mul(self.left.eval(x, y), self.right.eval(x, y))

    def declared_image(self) -> tuple[GroupElement, ...]:
        if self.image_override is not None:
            return self.image_override
        pc = self.postcomposition()
        if pc is not None:
            base, mapping = pc
            return _dedupe(mapping[z] for z in base.declared_image())
        return _dedupe(
            self.group.mul(a, b)
            for a in self.left.declared_image()
            for b in self.right.declared_image()
        )

    def section_preimage(self, axis: Axis, fixed: CantorPoint, z: GroupElement) -> ClopenSet:
        pc = self.postcomposition()
        if pc is not None:
            base, mapping = pc
            out = ClopenSet.empty()
            for w in base.declared_image():
                if mapping[w] == z:
                    out = out.union(base.section_preimage(axis, fixed, w))
            return out
        out = ClopenSet.empty()
        for a in self.left.declared_image():
            b = self.group.mul(self.group.inv(a), z)
            pre = self.left.section_preimage(axis, fixed, a).intersect(
                self.right.section_preimage(axis, fixed, b)
            )
            out = out.union(pre)
        return out

    def values_on_rect(self, u, v):
        pc = self.postcomposition()
        if pc is not None:
            base, mapping = pc
            vals, exact = base.values_on_rect(u, v)
            return frozenset(mapping[w] for w in vals), exact
        lv, lex = self.left.values_on_rect(u, v)
        rv, rex = self.right.values_on_rect(u, v)
        vals = frozenset(self.group.mul(a, b) for a in lv for b in rv)
        exact = lex and rex and (len(lv) == 1 or len(rv) == 1)
        return vals, exact

    def locally_constant_depth(self) -> int | None:
        dl, dr = self.left.locally_constant_depth(), self.right.locally_constant_depth()
        if dl is None or dr is None:
            return None
        return max(dl, dr)

    def _candidate_bases(self) -> list[SepFunction]:
        out: list[SepFunction] = []
        for child in (self.left, self.right):
            node = child
            while node is not None:
                if not isinstance(node, Constant):
                    out.append(node)
                pc = node.postcomposition()
                node = pc[0] if pc is not None and pc[0] is not node else None
        return out

    def postcomposition(self):
        for base in self._candidate_bases():
            lm = _map_over(self.left, base)
            rm = _map_over(self.right, base)
            if lm is not None and rm is not None:
                return base, {z: self.group.mul(lm[z], rm[z]) for z in base.declared_image()}
        return None


def product_chain(funcs: list[SepFunction]) -> SepFunction:
    """Ordered pointwise product f_0 * f_1 * ... * f_k."""
    if not funcs:
        raise ValueError("product of no functions")
    out = funcs[0]
    for f in funcs[1:]:
        out = PointwiseProduct(out, f)
    return out


@dataclass(frozen=True)
class SubbasicNbhd:
    """[K_X x K_Y, U]: functions mapping the rectangle into the finite set U."""

    kx: CantorPoint | ClopenSet
    ky: CantorPoint | ClopenSet
    allowed: frozenset[GroupElement]
    probe_id: str = ""

    def __post_init__(self) -> None:
        if not (isinstance(self.kx, CantorPoint) or isinstance(self.ky, CantorPoint)):
            raise ValueError("one of K_X, K_Y must be a singleton point")

    def singleton_axis(self) -> Axis:
        return "x" if isinstance(self.kx, CantorPoint) else "y"


def side_sample(side: CantorPoint | ClopenSet, grid_depth: int) -> tuple[CantorPoint, ...]:
    if isinstance(side, CantorPoint):
        return (side,)
    return tuple(c.representative() for c in side.cells_at_depth(grid_depth))


@dataclass(frozen=True)
class DistResult:
    value: Fraction
    exact: bool
    grid_depth: int
    witness: tuple[CantorPoint, CantorPoint] | None = None


@dataclass(frozen=True)
class MembershipResult:
    member: bool
    exact: bool
    witness: tuple[CantorPoint, CantorPoint, GroupElement] | None = None


def layerwise_dist(
    f: SepFunction,
    g: SepFunction,
    axis: Axis,
    fixed: CantorPoint,
    region: ClopenSet | None = None,
    grid_depth: int = 6,
) -> DistResult:
    """Max distance between the fixed-coordinate sections of f and g over the
    grid points of ``region``; a certified lower bound on the true sup, exact
    when both section partitions resolve within the grid depth."""
    region = region if region is not None else ClopenSet.whole()
    if region.depth() > grid_depth:
        raise ValueError("grid_depth must cover the region's cylinders")
    group = f.group
    best = Fraction(0)
    witness: tuple[CantorPoint, CantorPoint] | None = None
    for c in region.cells_at_depth(grid_depth):
        t = c.representative()
        fx, fy = (fixed, t) if axis == "x" else (t, fixed)
        d = group.dist(f.eval(fx, fy), g.eval(fx, fy))
        if d > best:
            best, witness = d, (fx, fy)
    exact = (
        max(f.section_depth(axis, fixed), g.section_depth(axis, fixed), region.depth())
        <= grid_depth
    )
    return DistResult(best, exact, grid_depth, witness)


def uniform_dist(f: SepFunction, g: SepFunction, side: Literal["l", "r"], grid_depth: int = 6) -> DistResult:
    """Grid sup of d(1, f^-1 g) (side l) or d(1, g f^-1) (side r)."""
    group = f.group
    one = group.identity()
    best = Fraction(0)
    witness = None
    points = ProbeGrid.at_depth(grid_depth).points
    for x in points:
        for y in points:
            fv, gv = f.eval(x, y), g.eval(x, y)
            if side == "l":
                d = group.dist(one, group.mul(group.inv(fv), gv))
            else:
                d = group.dist(one, group.mul(gv, group.inv(fv)))
            if d > best:
                best, witness = d, (x, y)
    dl, dg = f.locally_constant_depth(), g.locally_constant_depth()
    exact = dl is not None and dg is not None and max(dl, dg) <= grid_depth
    return DistResult(best, exact, grid_depth, witness)


def in_subbasic(f: SepFunction, nbhd: SubbasicNbhd, grid_depth: int = 6) -> MembershipResult:
    """Exact membership of f in [K_X x K_Y, U] via section preimages.

    The singleton side is evaluated exactly; on the other side the section
    partition is clopen, so containment reduces to exact set algebra.
    """
    axis = nbhd.singleton_axis()
    fixed = nbhd.kx if axis == "x" else nbhd.ky
    other = nbhd.ky if axis == "x" else nbhd.kx
    assert isinstance(fixed, CantorPoint)
    if isinstance(other, CantorPoint):
        val = f.eval(fixed, other) if axis == "x" else f.eval(other, fixed)
        if val in nbhd.allowed:
            return MembershipResult(True, True)
        pair = (fixed, other) if axis == "x" else (other, fixed)
        return MembershipResult(False, True, (pair[0], pair[1], val))
    parts = f.section_partition(axis, fixed)
    allowed_region = ClopenSet.empty()
    for z, pre in parts.items():
        if z in nbhd.allowed:
            allowed_region = allowed_region.union(pre)
    violating = other.minus(allowed_region)
    if violating.is_empty():
        return MembershipResult(True, True)
    t = violating.cylinders()[0].representative()
    fx, fy = (fixed, t) if axis == "x" else (t, fixed)
    return MembershipResult(False, True, (fx, fy, f.eval(fx, fy)))


def separate_continuity_certificate(f: SepFunction, probes: Iterable[CantorPoint], axis_list=("x", "y")) -> bool:
    """Check the partition property of all section preimages at the probes:
    preimages over the declared image are disjoint and cover the space."""
    for fixed in probes:
        for axis in axis_list:
            parts = f.section_partition(axis, fixed)
            total = ClopenSet.empty()
            for z, pre in parts.items():
                if not total.intersect(pre).is_empty():
                    return False
                total = total.union(pre)
            if not total.is_whole():
                return False
    return True


def grid_image(f: SepFunction, grid_depth: int) -> tuple[GroupElement, ...]:
    points = ProbeGrid.at_depth(grid_depth).points
    return _dedupe(f.eval(x, y) for x in points for y in points)


def validate_declared_image(f: SepFunction, grid_depth: int = 4) -> bool:
    declared = set(f.declared_image())
    return all(v in declared for v in grid_image(f, grid_depth))
