import math

import pytest

from conftest import EXPONENTS, random_diagram

from pdspace import (CIRCLES_LIMIT, CapabilityError, Diagram, SpaceMismatchError,
                     TruncatedDiagram, ValidationError, card_mismatch_lower_bound,
                     circles_partial, circles_point, circles_truncation, diagnose_set,
                     embed_symmetric, local_noncompactness_witnesses, make_space,
                     noncompactness_family, non_length_space, symmetric_dist, upper_part,
                     wasserstein)

LINF = make_space("halfplane:linf")


class TestDiagnose:
    def test_zero_family(self):
        rep = diagnose_set([Diagram.empty(LINF)], 1, [1.0, 0.5])
        for s in rep.scales:
            assert s.upper_count == 0 and s.net_centers == [] and s.delta is not None
        assert rep.totally_bounded_at_scales
        assert rep.relatively_compact_at_scales

    def test_multiplicity_growth(self):
        x = (0.0, 2.0)  # distance 1 from the diagonal
        fam = [Diagram(LINF, ((x, k),)) for k in range(1, 6)]
        rep = diagnose_set(fam, 2, [1.0, 0.5])
        assert [s.upper_count for s in rep.scales] == [5, 5]
        assert all(len(s.net_centers) == 1 for s in rep.scales)

    def test_upper_count_is_exact_max(self, rng):
        fam = [random_diagram(rng, LINF, 6) for _ in range(10)]
        rep = diagnose_set(fam, 1, [1.0, 0.3, 0.1])
        for s in rep.scales:
            assert s.upper_count == max(len(upper_part(a, s.eps)) for a in fam)

    def test_net_covers(self, rng):
        fam = [random_diagram(rng, LINF, 6) for _ in range(10)]
        rep = diagnose_set(fam, 2, [1.0, 0.25], net_factor=0.5)
        for s in rep.scales:
            pts = {x for a in fam for x in upper_part(a, s.eps).support}
            for x in pts:
                assert min(LINF.dist(x, c) for c in s.net_centers) <= s.net_radius
            assert s.net_covering_radius <= s.net_radius
            assert s.net_centers == sorted(s.net_centers) or s.net_centers[0] == min(pts)

    def test_finite_family_witnessed(self, rng):
        for p in EXPONENTS:
            fam = [random_diagram(rng, "halfplane:l2", 5) for _ in range(6)]
            rep = diagnose_set(fam, p, [2.0, 1.0, 0.1, 0.01])
            assert rep.totally_bounded_at_scales

    def test_circles_truncations(self):
        fam = [circles_truncation(N) for N in range(2, 10)]
        rep = diagnose_set(fam, 1, [4.0, 2.0])
        for s in rep.scales:
            assert s.delta is not None
            assert s.lower_norm_bound < s.eps

    def test_tail_blocks_certification(self):
        td = TruncatedDiagram(Diagram.empty(LINF), 1.0, "inf")
        rep = diagnose_set([td], "inf", [0.5])
        assert not rep.scales[0].upper_count_certified
        assert not rep.totally_bounded_at_scales

    def test_errors(self):
        a = Diagram.empty(LINF)
        with pytest.raises(ValidationError):
            diagnose_set([a], 1, [])
        with pytest.raises(ValidationError):
            diagnose_set([a], 1, [0.5, 1.0])
        with pytest.raises(SpaceMismatchError):
            diagnose_set([a, Diagram.empty("halfplane:l1")], 1, [1.0])

    def test_report_json(self):
        a = Diagram.from_points(LINF, [(0, 4)])
        rep = diagnose_set([a], "inf", [1.0])
        obj = rep.to_json(LINF)
        assert obj["p"] == "inf"
        assert obj["scales"][0]["net_centers"] == [[0.0, 4.0]]
        assert set(obj["verdict"]) >= {"uniformly_upper_finite", "upper_totally_bounded",
                                       "uniformly_p_vanishing"}


class TestEmbedding:
    def test_zero(self):
        sp = make_space("pointed_euclidean:2")
        u = embed_symmetric(Diagram.empty(sp), 2)
        assert u.slots == ((0.0, 0.0),) * 4
        assert symmetric_dist(u, u, 2) == 0.0

    def test_ray_example(self):
        ray = make_space("ray")
        u = embed_symmetric(Diagram.from_points(ray, [3.0]), 1)
        v = embed_symmetric(Diagram.from_points(ray, [5.0]), 1)
        assert symmetric_dist(u, v, 1) == 2.0
        assert wasserstein(Diagram.from_points(ray, [3.0]), Diagram.from_points(ray, [5.0]), 1).value == 2.0

    def test_isometry(self, rng):
        for name in ("pointed_euclidean:2", "ray"):
            sp = make_space(name)
            for p in EXPONENTS:
                for _ in range(20):
                    a, b = random_diagram(rng, sp, 3), random_diagram(rng, sp, 3)
                    s = symmetric_dist(embed_symmetric(a, 3), embed_symmetric(b, 3), p)
                    assert s == pytest.approx(wasserstein(a, b, p).value, abs=1e-9)

    def test_errors(self):
        sp = make_space("pointed_euclidean:1")
        with pytest.raises(ValidationError):
            embed_symmetric(Diagram.from_points(sp, [1.0, 2.0]), 1)
        with pytest.raises(CapabilityError):
            embed_symmetric(Diagram.empty(LINF), 2)


class TestNoncompactness:
    def test_bottleneck_example(self):
        fam = noncompactness_family(Diagram.empty(LINF), 0.5, "inf", 6)
        assert fam.approach_points[0] == (0.0, 0.6)
        assert fam.betas[2] == Diagram(LINF, (((0.0, 0.6), 3),))
        for i in range(6):
            for k in range(i):
                assert wasserstein(fam.betas[i], fam.betas[k], "inf").value == 0.3

    @pytest.mark.parametrize("p", [1, 1.5, 2, 3])
    def test_finite_p(self, p):
        alpha = Diagram.from_points(LINF, [(0, 10)])
        betas = local_noncompactness_witnesses(alpha, 0.5, p, 8)
        for b in betas:
            assert wasserstein(b, alpha, p).value < 0.5
        for i in range(len(betas)):
            for k in range(i):
                assert wasserstein(betas[i], betas[k], p).value >= 0.5 / 4 - 1e-12
                assert card_mismatch_lower_bound(betas[i], betas[k], p) >= 0.5 / 4 - 1e-12

    def test_multiplicities_double(self):
        fam = noncompactness_family(Diagram.empty(LINF), 0.5, 1, 10)
        assert fam.exponents == sorted(fam.exponents)
        assert fam.radius_bound < 0.5
        assert fam.separation_bound >= 0.5 / 4 - 1e-12

    def test_other_spaces(self):
        for name in ("halfplane:l1", "halfplane:l2", "ray", "pointed_euclidean:2"):
            sp = make_space(name)
            for p in (1, "inf"):
                fam = noncompactness_family(Diagram.empty(sp), 0.5, p, 5)
                assert len(fam.betas) == 5

    def test_eps_precondition(self):
        with pytest.raises(ValidationError):
            local_noncompactness_witnesses(Diagram.from_points(LINF, [(0, 1)]), 0.6, 1, 3)

    def test_no_approach_sequence(self):
        from pdspace import CustomMetricPair

        iso = CustomMetricPair("isolated", dist=lambda x, y: 1.0, dist_to_A=lambda x: 1.0,
                               in_A=lambda x: x == (0,))
        with pytest.raises(CapabilityError):
            local_noncompactness_witnesses(Diagram.empty(iso), 0.5, 1, 3)


class TestGallery:
    def test_circles_partial(self):
        partial, tail = circles_partial(1)
        assert partial == pytest.approx(math.pi) and tail == pytest.approx(math.pi)
        assert CIRCLES_LIMIT == pytest.approx(5.167713, abs=1e-6)
        for N in (1, 10, 100):
            partial, tail = circles_partial(N)
            assert partial <= CIRCLES_LIMIT <= partial + tail

    def test_circles_p_rejected(self):
        with pytest.raises(ValidationError):
            circles_partial(10, 2)

    def test_circles_points(self):
        sp = make_space("wedge_circles")
        for n in (1, 2, 5):
            x = sp.validate(circles_point(n))
            assert sp.dist_to_A(x) == pytest.approx(math.pi / n**2)
        td = circles_truncation(20)
        assert len(td.head) == 20 and td.tail_bound == pytest.approx(math.pi / 20)

    def test_circles_truncations_converge(self):
        a, b = circles_truncation(10), circles_truncation(20)
        w = wasserstein(a.head, b.head, 1).value
        assert w <= a.tail_bound
        assert w == pytest.approx(sum(math.pi / n**2 for n in range(11, 21)))

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_non_length_space(self, n):
        for p in (1, 2, 3):
            out = non_length_space(n, p)
            assert out["wasserstein"] == pytest.approx((n + 1) ** (1 / p), rel=1e-12)
            assert out["geodesic_length"] == pytest.approx(out["wasserstein"], rel=1e-9)
            assert out["geodesic_max_points"] == n + 1
            assert out["sequential_max_points"] <= n
            assert out["d_p"] == pytest.approx(2 ** (1 / p))
        out = non_length_space(n, 1)
        assert out["sequential_length"] == pytest.approx(out["wasserstein"])
