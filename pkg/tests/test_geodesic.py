import pytest

from conftest import EXPONENTS, random_diagram

from pdspace import (CapabilityError, ConcatenatedPath, Diagram, Matching, ValidationError,
                     alexandrov_residual, cost_p, distinct_geodesics, geodesic, make_space,
                     path_length, retract_diagram, sequential_path, straight_line_contraction,
                     wasserstein)

LINF = make_space("halfplane:linf")
L2 = make_space("halfplane:l2")


def D(*pts, space=LINF):
    return Diagram.from_points(space, pts)


class TestGeodesic:
    def test_constant(self):
        a = D((0, 2), (1, 5))
        g = geodesic(a, a, 2)
        assert all(g.eval(t) == a for t in (0, 0.3, 1))
        assert path_length(g, 5) == 0.0

    def test_midpoint(self):
        g = geodesic(D((0, 10)), D((1, 9)), "inf")
        assert g.eval(0.5) == D((0.5, 9.5))
        assert g(0) == D((0, 10)) and g(1) == D((1, 9))

    def test_to_empty(self):
        g = geodesic(D((0, 4)), D(), 1)
        assert g.eval(0.5) == D((1, 3))
        assert g.eval(1) == D()

    def test_birth_from_A(self):
        g = geodesic(D(), D((0, 4)), 2)
        assert g.eval(0) == D()
        assert g.eval(0.5) == D((1, 3))

    def test_t_range(self):
        g = geodesic(D((0, 4)), D(), 1)
        for t in (-0.1, 1.5):
            with pytest.raises(ValidationError):
                g.eval(t)

    def test_capabilities(self):
        wc = make_space("wedge_circles")
        a = Diagram.from_points(wc, [(1, 4.0)])
        with pytest.raises(CapabilityError):
            geodesic(a, Diagram.empty(wc), 1)
        wi = make_space("wedge_intervals")
        a = Diagram.from_points(wi, [(1, 0.0)])
        with pytest.raises(CapabilityError):
            geodesic(a, Diagram.empty(wi), 1)

    def test_infinite_distance(self):
        with pytest.raises(ValidationError):
            geodesic(D((0, "inf")), D(), 1)

    def test_identity_random(self, rng):
        grid = [k / 10 for k in range(11)]
        for name in ("halfplane:l1", "halfplane:linf", "ray", "pointed_euclidean:3"):
            sp = make_space(name)
            for i in range(15):
                p = EXPONENTS[i % len(EXPONENTS)]
                a, b = random_diagram(rng, sp, 4), random_diagram(rng, sp, 4)
                g = geodesic(a, b, p)
                W = wasserstein(a, b, p).value
                for s in grid[::2]:
                    for t in grid[1::2]:
                        got = wasserstein(g.eval(s), g.eval(t), p).value
                        assert abs(got - abs(s - t) * W) <= 1e-6 * max(1.0, W)

    def test_path_length_band_and_monotone(self, rng):
        for _ in range(20):
            a, b = random_diagram(rng, L2, 4), random_diagram(rng, L2, 4)
            g = geodesic(a, b, 2)
            W = wasserstein(a, b, 2).value
            lengths = [path_length(g, N) for N in (2, 4, 8)]
            for L in lengths:
                assert W - 1e-9 <= L <= W + 1e-6
            assert lengths[0] <= lengths[1] + 1e-12 <= lengths[2] + 2e-12

    def test_path_length_validation(self):
        with pytest.raises(ValidationError):
            path_length(geodesic(D((0, 2)), D(), 1), 0)


class TestConcatenation:
    def test_two_legs_through_zero(self):
        a, b = D((0, 4)), D((10, 12))
        legs = [geodesic(a, D(), 1), geodesic(D(), b, 1)]
        path = ConcatenatedPath(legs)
        assert path.eval(0.5) == D()
        total = path_length(path, 8, 1)
        assert total == pytest.approx(sum(path_length(g, 4) for g in legs))

    def test_needs_a_leg(self):
        with pytest.raises(ValidationError):
            ConcatenatedPath([])

    def test_sequential_path_p1(self, rng):
        for _ in range(20):
            a, b = random_diagram(rng, L2, 4, 1), random_diagram(rng, L2, 4, 1)
            path = sequential_path(a, b)
            N = 8 * len(path.legs)
            assert path_length(path, N, 1) == pytest.approx(wasserstein(a, b, 1).value, rel=1e-9)
            cap = max(len(a), len(b))
            assert max(len(path.eval(k / N)) for k in range(N + 1)) <= cap
            assert path.eval(0) == a and path.eval(1) == b

    def test_non_length_instance(self):
        sp = make_space("halfplane:l1")
        a = Diagram(sp, (((0, 1), 1), ((0, 10), 2)))
        b = Diagram(sp, (((10, 11), 1), ((0, 11), 2)))
        g = geodesic(a, b, 2)
        assert len(g.eval(0.5)) == 4
        seq = sequential_path(a, b)
        assert path_length(seq, 8 * len(seq.legs), 2) > wasserstein(a, b, 2).value


class TestDistinctGeodesics:
    def test_symmetric_instance(self):
        a = D((0, 10), (2, 12))
        b = D((0, 12), (2, 10))
        for p in (1, 2, "inf"):
            paths = distinct_geodesics(a, b, p, k=5)
            assert len(paths) >= 2
            W = wasserstein(a, b, p).value
            for g in paths:
                assert isinstance(g.matching, Matching)
                assert abs(cost_p(g.matching.validate(), p) - W) <= 1e-12 * max(1, W)
            assert len({g.eval(0.5) for g in paths}) >= 2

    def test_generic_unique(self):
        a = D((0, 2), (5, 9))
        b = D((0.1, 2.2), (5.3, 9.1))
        assert len(distinct_geodesics(a, b, 2, k=5)) == 1

    def test_ray_single(self):
        ray = make_space("ray")
        a = Diagram.from_points(ray, [3.0])
        [g] = distinct_geodesics(a, Diagram.empty(ray), 1, k=3)
        assert g.eval(0.5) == Diagram.from_points(ray, [1.5])

    def test_cap(self):
        a = D(*[(0, k + 2) for k in range(6)])
        with pytest.raises(ValidationError):
            distinct_geodesics(a, D(*[(1, k + 3) for k in range(6)]), 1, max_points=10)


class TestAlexandrov:
    def test_trivial_cases(self, rng):
        a, b = D((0, 2), space=L2), D((1, 5), space=L2)
        assert alexandrov_residual(a, b, a, 0.0) == pytest.approx(0.0, abs=1e-12)
        for t in (0.25, 0.5, 0.75):
            mid = geodesic(a, b, 2).eval(t)
            assert alexandrov_residual(a, b, mid, t) == pytest.approx(0.0, abs=1e-9)

    def test_random(self, rng):
        for sp in (L2, make_space("pointed_euclidean:2"), make_space("ray")):
            for t in (0.25, 0.5, 0.75):
                for _ in range(20):
                    a, b, xi = (random_diagram(rng, sp, 3) for _ in range(3))
                    assert alexandrov_residual(a, b, xi, t) >= -1e-9

    def test_rejections(self):
        a = D((0, 2), space=L2)
        with pytest.raises(ValidationError):
            alexandrov_residual(a, a, a, 0.5, p=1)
        with pytest.raises(CapabilityError):
            alexandrov_residual(D((0, 2)), D(), D(), 0.5)


class TestRetraction:
    def test_examples(self):
        sp = make_space("pointed_euclidean:1")
        a = Diagram.from_points(sp, [4.0])
        assert retract_diagram(None, a, 0.5) == Diagram.from_points(sp, [2.0])
        assert retract_diagram(None, a, 0.0) == a
        assert retract_diagram(None, a, 1.0) == Diagram.empty(sp)

    def test_custom_H(self):
        ray = make_space("ray")
        H = lambda x, t: (x[0] * (1 - t) ** 2,)  # noqa: E731
        a = Diagram.from_points(ray, [2.0, 3.0])
        assert retract_diagram(H, a, 0.5) == Diagram.from_points(ray, [0.5, 0.75])

    def test_needs_pointed(self):
        with pytest.raises(CapabilityError):
            retract_diagram(None, D((0, 2)), 0.5)
        with pytest.raises(CapabilityError):
            straight_line_contraction(L2)

    def test_continuity_trend(self, rng):
        sp = make_space("pointed_euclidean:2")
        for _ in range(20):
            a = random_diagram(rng, sp, 4, 1)
            t = rng.random()
            gaps = []
            for delta in (1e-1, 1e-2, 1e-3):
                moved = Diagram.from_points(sp, [
                    tuple(v + rng.uniform(-delta, delta) / 2 for v in x) for x in a])
                assert wasserstein(a, moved, "inf").value < delta
                gaps.append(wasserstein(retract_diagram(None, a, t),
                                        retract_diagram(None, moved, t), "inf").value)
            assert gaps[0] >= gaps[1] >= gaps[2]
            assert gaps[2] < 1e-3
