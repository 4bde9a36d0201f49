import math

import numpy as np
import pytest

from bergman.models import make_cyclic_weights
from bergman.orbifold import (
    admissible_indices,
    degree_cap_for,
    min_on_ray,
    rho_closed,
    rho_closed_detailed,
    rho_oracle,
)

# 12-digit fixtures computed by independent 1-D minimization / closed forms
# before the kernel code existed.
RAY_MIN_Z3 = 0.973420066524       # min over t of rho on the C/Z_3 ray r=(1,)
WITNESS_Z3 = 0.991333158980034    # 1 - 2 exp(-sqrt(3) pi)
RHO_Z3_AT_ONE = 0.983601465813    # 1 + 2 e^{-3 pi/2} cos(sqrt(3) pi/2)


class TestClosedForm:
    def test_origin_value_is_group_order(self):
        for pairs in ([(1, 2)], [(1, 3), (1, 5)], [(3, 7), (2, 5), (1, 2)]):
            w = make_cyclic_weights(pairs)
            z = np.zeros(w.n)
            assert abs(rho_closed(w, z) - w.q) < 1e-12

    def test_trivial_group_kernel_is_one(self):
        w = make_cyclic_weights([(0, 1)])
        for s in (0.0, 0.7, 2.3):
            assert abs(rho_closed(w, [s]) - 1.0) < 1e-12

    def test_z2_closed_form(self):
        # q = 2: rho = 1 + exp(-2 pi |z|^2)
        w = make_cyclic_weights([(1, 2)])
        assert abs(rho_closed(w, [1.0]) - (1 + math.exp(-2 * math.pi))) < 1e-14

    def test_z3_fixture(self):
        w = make_cyclic_weights([(1, 3)])
        assert abs(rho_closed(w, [1.0]) - RHO_Z3_AT_ONE) < 1e-10

    def test_imaginary_residue_negligible(self):
        w = make_cyclic_weights([(2, 7), (3, 5)])
        _, resid = rho_closed_detailed(w, [1.1 + 0.0j, 0.4])
        assert resid < 1e-12

    def test_group_invariance(self):
        w = make_cyclic_weights([(1, 3), (2, 5)])
        z = np.array([0.8 + 0.3j, 1.1 - 0.2j])
        base = rho_closed(w, z)
        for a in range(1, w.q):
            assert abs(rho_closed(w, w.sigma(z, a)) - base) < 1e-12

    def test_shape_validation(self):
        w = make_cyclic_weights([(1, 3)])
        with pytest.raises(ValueError):
            rho_closed(w, [1.0, 2.0])


class TestAdmissibleIndices:
    def test_z3_low_degrees(self):
        w = make_cyclic_weights([(1, 3)])
        idx = admissible_indices(w, 7)
        assert idx == [(0,), (3,), (6,)]

    def test_two_coordinate_congruence(self):
        w = make_cyclic_weights([(1, 3), (1, 5)])
        idx = admissible_indices(w, 8)
        for j in idx:
            assert (j[0] * 5 + j[1] * 3) % 15 == 0
        assert (0, 0) in idx and (5, 5) not in idx  # 5/3+5/5 = 8/3 not integral

    def test_graded_lex_order(self):
        w = make_cyclic_weights([(1, 2), (1, 2)])
        idx = admissible_indices(w, 3)
        degs = [sum(j) for j in idx]
        assert degs == sorted(degs)

    def test_negative_cap_rejected(self):
        w = make_cyclic_weights([(1, 2)])
        with pytest.raises(ValueError):
            admissible_indices(w, -1)


class TestOracle:
    @pytest.mark.parametrize("pairs,z", [
        ([(1, 2)], [0.7]),
        ([(1, 3)], [1.0]),
        ([(2, 5)], [1.4]),
        ([(1, 3), (1, 5)], [0.9, 0.6]),
    ])
    def test_matches_closed_form(self, pairs, z):
        w = make_cyclic_weights(pairs)
        cap = degree_cap_for(w, z, 1e-11)
        res = rho_oracle(w, z, cap)
        assert abs(res.value - rho_closed(w, z)) <= res.tail_bound + 1e-10

    def test_tail_bound_decreases_with_cap(self):
        w = make_cyclic_weights([(1, 3)])
        t1 = rho_oracle(w, [1.0], 10).tail_bound
        t2 = rho_oracle(w, [1.0], 20).tail_bound
        assert t2 < t1

    def test_zero_coordinate_handled(self):
        w = make_cyclic_weights([(1, 3), (1, 5)])
        cap = degree_cap_for(w, [1.0, 0.0], 1e-11)
        res = rho_oracle(w, [1.0, 0.0], cap)
        assert abs(res.value - rho_closed(w, [1.0, 0.0])) <= res.tail_bound + 1e-10


class TestRayMinimum:
    def test_z3_ray_minimum_fixture(self):
        w = make_cyclic_weights([(1, 3)])
        t_star, rho_star = min_on_ray(w, [1.0], 3.0)
        assert abs(rho_star - RAY_MIN_Z3) < 1e-10
        assert rho_star < WITNESS_Z3 < 1.0

    def test_direction_validation(self):
        w = make_cyclic_weights([(1, 3), (1, 5)])
        with pytest.raises(ValueError):
            min_on_ray(w, [0.0, 0.0], 1.0)
        with pytest.raises(ValueError):
            min_on_ray(w, [1.0, -0.5], 1.0)
        with pytest.raises(ValueError):
            min_on_ray(w, [1.0, 1.0], 0.0)


class TestRandomizedProperties:
    SEED = 20240824

    def _random_weights(self, rng):
        while True:
            n = rng.integers(1, 4)
            pairs = []
            for _ in range(n):
                q = int(rng.integers(1, 13))
                ps = [p for p in range(q) if math.gcd(p, q) == 1] or [0]
                pairs.append((int(rng.choice(ps)), q))
            w = make_cyclic_weights(pairs)
            if w.q <= 60:
                return w

    def test_property_suite(self):
        rng = np.random.default_rng(self.SEED)
        for _ in range(120):
            w = self._random_weights(rng)
            z = rng.normal(size=w.n) + 1j * rng.normal(size=w.n)
            assert abs(rho_closed(w, np.zeros(w.n)) - w.q) < 1e-12
            if w.q == 1:
                assert abs(rho_closed(w, z) - 1.0) < 1e-12
            base = rho_closed(w, z)
            a = int(rng.integers(1, w.q + 1))
            assert abs(rho_closed(w, w.sigma(z, a)) - base) < 1e-12 * max(base, 1.0)
