from fractions import Fraction
from itertools import product

import pytest

from sepcont.cantor import ALL_ONES, CantorPoint, ClopenSet, Cylinder, ProbeGrid
from sepcont.errors import UnsupportedStructureError
from sepcont.functions import (
    Constant,
    DiagonalIndicator,
    PointwiseInverse,
    PointwiseProduct,
    PostCompose,
    SepFunction,
    SubbasicNbhd,
    TableFunction,
    grid_image,
    in_subbasic,
    layerwise_dist,
    separate_continuity_certificate,
    uniform_dist,
    validate_declared_image,
)
from sepcont.groups import get_group, symmetric_group_3

DYADIC = get_group("dyadic")
C3 = get_group("cyclic:3")
E = DYADIC.identity()
A = DYADIC.parse_element("1(0)")
B = DYADIC.parse_element("01(0)")

DIAG = DiagonalIndicator.ones_schema([A])
MULTI = DiagonalIndicator.ones_schema([A, B, DYADIC.parse_element("001(0)")])
FINITE_DIAG = DiagonalIndicator.from_pairs([(Cylinder("0"), A), (Cylinder("10"), B)])

PROBE_POINTS = [CantorPoint.parse(s) for s in ["(0)", "(1)", "10(0)", "110(0)", "01(1)", "1(10)"]]


def brute_section_values(f: SepFunction, axis, fixed, depth=5):
    """Oracle: sample the section on a deep grid."""
    out = {}
    for p in ProbeGrid.at_depth(depth).points:
        val = f.eval(fixed, p) if axis == "x" else f.eval(p, fixed)
        out[p] = val
    return out


class TestEval:
    def test_constant_everywhere(self):
        c = Constant(A)
        for x, y in product(PROBE_POINTS, repeat=2):
            assert c.eval(x, y) == A

    def test_diag_matched_and_unmatched(self):
        x = CantorPoint.parse("110(0)")
        assert DIAG.eval(x, x) == A
        assert DIAG.eval(x, CantorPoint.parse("(0)")) == E

    def test_diag_at_accumulation_point(self):
        for y in PROBE_POINTS:
            assert DIAG.eval(ALL_ONES, y) == E
            assert DIAG.eval(y, ALL_ONES) == E

    def test_multi_value_schedule(self):
        x0 = CantorPoint.parse("0(0)")
        x1 = CantorPoint.parse("10(0)")
        x2 = CantorPoint.parse("110(0)")
        x3 = CantorPoint.parse("1110(0)")
        assert MULTI.eval(x0, x0) == A
        assert MULTI.eval(x1, x1) == B
        assert MULTI.eval(x2, x2) == DYADIC.parse_element("001(0)")
        assert MULTI.eval(x3, x3) == A  # cycles
        assert MULTI.eval(x0, x1) == E

    def test_finite_family(self):
        x = CantorPoint.parse("0(0)")
        y = CantorPoint.parse("10(0)")
        assert FINITE_DIAG.eval(x, x) == A
        assert FINITE_DIAG.eval(y, y) == B
        assert FINITE_DIAG.eval(x, y) == E
        assert FINITE_DIAG.eval(ALL_ONES, ALL_ONES) == E

    def test_disjointness_validated(self):
        with pytest.raises(ValueError):
            DiagonalIndicator.from_pairs([(Cylinder("0"), A), (Cylinder("01"), B)])

    def test_table_lookup(self):
        t = TableFunction(1, ((E, A), (A, E)))
        assert t.eval(CantorPoint.parse("0(0)"), CantorPoint.parse("1(0)")) == A
        assert t.eval(CantorPoint.parse("1(0)"), CantorPoint.parse("1(0)")) == E

    def test_product_inverse(self):
        f = PointwiseProduct(Constant(A), DIAG)
        x = CantorPoint.parse("0(0)")
        assert f.eval(x, x) == DYADIC.mul(A, A)
        g = PointwiseInverse(DIAG)
        assert g.eval(x, x) == A  # dyadic elements are involutions


class TestDeclaredImage:
    @pytest.mark.parametrize(
        "f",
        [Constant(A), DIAG, MULTI, FINITE_DIAG, PointwiseProduct(DIAG, Constant(A)),
         PointwiseInverse(MULTI)],
        ids=["const", "diag", "multi", "finite", "prod", "inv"],
    )
    def test_grid_values_in_declared(self, f):
        assert validate_declared_image(f, 4)

    def test_postcompose_requires_total_mapping(self):
        with pytest.raises(UnsupportedStructureError):
            PostCompose(DIAG, {E: E}, "partial")


class TestSectionPreimage:
    def test_constant(self):
        c = Constant(A)
        assert c.section_preimage("x", PROBE_POINTS[0], A).is_whole()
        assert c.section_preimage("x", PROBE_POINTS[0], E).is_empty()

    def test_diag_fixed_in_member(self):
        x = CantorPoint.parse("110(0)")
        assert DIAG.section_preimage("x", x, A) == ClopenSet.parse("{110}")
        assert DIAG.section_preimage("x", x, E) == ClopenSet.parse("{110}").complement()

    def test_table_row(self):
        t = TableFunction(2, tuple(tuple(A if (i + j) % 2 else E for j in range(4)) for i in range(4)))
        pre = t.section_preimage("x", CantorPoint.parse("00(0)"), A)
        assert pre == ClopenSet.from_prefixes(["01", "11"])

    @pytest.mark.parametrize(
        "f",
        [Constant(A), DIAG, MULTI, FINITE_DIAG,
         PointwiseProduct(DIAG, Constant(A)), PointwiseInverse(MULTI),
         PointwiseProduct(PointwiseInverse(DIAG), MULTI)],
        ids=["const", "diag", "multi", "finite", "prod", "inv", "prod2"],
    )
    @pytest.mark.parametrize("axis", ["x", "y"])
    def test_partition_property(self, f, axis):
        # separate-continuity certificate: preimages partition the space
        for fixed in PROBE_POINTS:
            parts = f.section_partition(axis, fixed)
            total = ClopenSet.empty()
            for pre in parts.values():
                assert total.intersect(pre).is_empty()
                total = total.union(pre)
            assert total.is_whole()

    @pytest.mark.parametrize("axis", ["x", "y"])
    def test_sections_match_brute_force(self, axis):
        for f in [DIAG, MULTI, FINITE_DIAG, PointwiseProduct(PointwiseInverse(DIAG), MULTI)]:
            for fixed in PROBE_POINTS[:4]:
                sampled = brute_section_values(f, axis, fixed)
                for p, val in sampled.items():
                    assert f.section_preimage(axis, fixed, val).contains(p)

    def test_certificate_helper(self):
        assert separate_continuity_certificate(DIAG, PROBE_POINTS)


class TestValuesOnRect:
    def test_diag_oracle_small_rects(self):
        # oracle: deep-grid sampling within each rectangle must stay inside
        # the reported value set, and hit it exactly when flagged exact
        prefixes = ["", "0", "1", "11", "10", "111", "110"]
        for pu, pv in product(prefixes, repeat=2):
            u, v = Cylinder(pu), Cylinder(pv)
            vals, exact = DIAG.values_on_rect(u, v)
            seen = set()
            for x in ProbeGrid.at_depth(6).points:
                if not u.contains(x):
                    continue
                for y in ProbeGrid.at_depth(6).points:
                    if v.contains(y):
                        seen.add(DIAG.eval(x, y))
            # include the accumulation-point rows not on the zero-tail grid
            if all(c == "1" for c in pu):
                for y in ProbeGrid.at_depth(6).points:
                    if v.contains(y):
                        seen.add(DIAG.eval(ALL_ONES, y))
                if all(c == "1" for c in pv):
                    seen.add(DIAG.eval(ALL_ONES, ALL_ONES))
            assert seen <= set(vals)
            if exact and len(pu) >= 3 and len(pv) >= 3:
                assert seen == set(vals)

    def test_fused_product_has_no_cross_terms(self):
        im = DIAG.declared_image()
        f0 = PostCompose(DIAG, {z: E for z in im}, "r0")
        f1 = PostCompose(DIAG, {z: z for z in im}, "r1")
        g = PointwiseProduct(PointwiseInverse(f0), f1)
        base, mapping = g.postcomposition()
        assert base is DIAG
        vals, exact = g.values_on_rect(Cylinder(""), Cylinder(""))
        assert vals == frozenset(DIAG.declared_image())

    def test_constant_value_on(self):
        assert DIAG.constant_value_on(Cylinder("110"), Cylinder("110")) == A
        assert DIAG.constant_value_on(Cylinder("0"), Cylinder("1")) == E
        assert DIAG.constant_value_on(Cylinder("11"), Cylinder("11")) is None
        assert DIAG.constant_value_on(Cylinder(""), Cylinder("")) is None


class TestLocallyConstantDepth:
    def test_depths(self):
        assert Constant(A).locally_constant_depth() == 0
        assert TableFunction(1, ((E, A), (A, E))).locally_constant_depth() == 1
        assert DIAG.locally_constant_depth() is None
        assert FINITE_DIAG.locally_constant_depth() == 3
        finite_schema = DiagonalIndicator.ones_schema([A, B], cycle=False)
        assert finite_schema.locally_constant_depth() == 3


class TestLayerwiseDist:
    def test_zero_on_equal(self):
        r = layerwise_dist(DIAG, DIAG, "x", PROBE_POINTS[0], None, 4)
        assert r.value == 0

    def test_constant_distance(self):
        r = layerwise_dist(Constant(E), Constant(A), "x", PROBE_POINTS[0], None, 3)
        assert r.value == Fraction(1, 2) and r.exact

    @pytest.mark.parametrize("depth", range(2, 6))
    def test_monotone_in_grid_depth(self, depth):
        x = CantorPoint.parse("10(0)")
        lo = layerwise_dist(DIAG, Constant(E), "x", x, None, depth).value
        hi = layerwise_dist(DIAG, Constant(E), "x", x, None, depth + 1).value
        assert hi >= lo

    def test_region_restriction(self):
        x = CantorPoint.parse("10(0)")
        inside = layerwise_dist(DIAG, Constant(E), "x", x, ClopenSet.parse("{10}"), 4)
        outside = layerwise_dist(DIAG, Constant(E), "x", x, ClopenSet.parse("{0}"), 4)
        assert inside.value == Fraction(1, 2)
        assert outside.value == 0


class TestUniformDist:
    def test_zero_on_equal(self):
        assert uniform_dist(DIAG, DIAG, "l", 3).value == 0

    def test_abelian_l_equals_r(self):
        for f, g in [(DIAG, Constant(E)), (MULTI, Constant(A)), (DIAG, MULTI)]:
            assert uniform_dist(f, g, "l", 3).value == uniform_dist(f, g, "r", 3).value

    def test_const_vs_diag(self):
        for depth in [2, 3, 4]:
            assert uniform_dist(Constant(E), DIAG, "l", depth).value == Fraction(1, 2)

    def test_s3_sides_both_defined(self):
        S3 = symmetric_group_3()
        r, s = S3.parse_element("r"), S3.parse_element("s")
        f, g = Constant(r), Constant(s)
        # discrete metric: both sides see the same mismatch
        assert uniform_dist(f, g, "l", 1).value == Fraction(1, 2)
        assert uniform_dist(f, g, "r", 1).value == Fraction(1, 2)

    def test_l_value_is_plain_metric_sup(self):
        # left-invariance: d(1, f^-1 g) == d(f, g) pointwise
        depth = 3
        got = uniform_dist(DIAG, MULTI, "l", depth).value
        pts = ProbeGrid.at_depth(depth).points
        direct = max(
            DYADIC.dist(DIAG.eval(x, y), MULTI.eval(x, y)) for x in pts for y in pts
        )
        assert got == direct

    @pytest.mark.parametrize("depth", range(1, 4))
    def test_monotone_in_grid_depth(self, depth):
        lo = uniform_dist(DIAG, Constant(E), "l", depth).value
        hi = uniform_dist(DIAG, Constant(E), "l", depth + 1).value
        assert hi >= lo


class TestInSubbasic:
    def test_whole_image_always_member(self):
        nb = SubbasicNbhd(PROBE_POINTS[0], ClopenSet.whole(), frozenset(DIAG.declared_image()))
        assert in_subbasic(DIAG, nb, 4).member

    def test_accumulation_row_identity(self):
        nb = SubbasicNbhd(ALL_ONES, ClopenSet.whole(), frozenset([E]))
        res = in_subbasic(DIAG, nb, 4)
        assert res.member and res.exact

    def test_violation_with_witness(self):
        nb = SubbasicNbhd(CantorPoint.parse("110(0)"), ClopenSet.whole(), frozenset([E]))
        res = in_subbasic(DIAG, nb, 4)
        assert not res.member
        wx, wy, val = res.witness
        assert val == A and Cylinder("110").contains(wy)

    def test_singleton_both_sides(self):
        nb = SubbasicNbhd(CantorPoint.parse("0(0)"), CantorPoint.parse("0(0)"), frozenset([A]))
        assert in_subbasic(DIAG, nb, 4).member

    def test_y_singleton_side(self):
        nb = SubbasicNbhd(ClopenSet.parse("{1}"), CantorPoint.parse("0(0)"), frozenset([E]))
        assert in_subbasic(DIAG, nb, 4).member

    def test_requires_singleton(self):
        with pytest.raises(ValueError):
            SubbasicNbhd(ClopenSet.whole(), ClopenSet.whole(), frozenset([E]))

    def test_grid_agreement(self):
        # the exact decision agrees with brute-force grid sweeps
        for f in [DIAG, MULTI]:
            for fixed in PROBE_POINTS[:4]:
                for allowed in [frozenset([E]), frozenset([E, A])]:
                    nb = SubbasicNbhd(fixed, ClopenSet.whole(), allowed)
                    exact = in_subbasic(f, nb, 5).member
                    sweep = all(
                        f.eval(fixed, y) in allowed for y in ProbeGrid.at_depth(5).points
                    ) and f.eval(fixed, ALL_ONES) in allowed
                    assert exact == sweep


class TestGridImage:
    def test_diag_grid_image(self):
        assert set(grid_image(DIAG, 4)) == {E, A}
