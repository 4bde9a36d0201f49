import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import gammaln

from bergman.gram import (
    GramModel,
    fs_log_norms,
    gram_matrix,
    perturbed_area_density,
    rho_gram,
    rho_gram_field,
)
from bergman.kernels import (
    cpn_fs_exact,
    cpn_fs_oracle,
    kernel_area_integral,
    log_monomial_norms,
    monomial_norms,
    peak_section_tail,
    rho_at_u,
    rho_revolution,
)
from bergman.models import (
    PerturbedPotential,
    cone_approx_profile,
    make_cone_family,
    rescale_to_area,
    round_sphere,
)
from bergman.potential import build_potential

R_UNIT = 1.0 / math.sqrt(4.0 * math.pi)  # round area-1 sphere radius


@pytest.fixture(scope="module")
def round_table():
    return build_potential(round_sphere())


@pytest.fixture(scope="module")
def cone8_table():
    return build_potential(rescale_to_area(make_cone_family(8).profile, 1))


class TestPotential:
    def test_degree_bookkeeping(self, round_table):
        t = round_table
        span = t.phi_prime(t.u_max) - t.phi_prime(t.u_min)
        assert abs(span - 1.0 / math.pi) < 1e-8

    def test_phi_matches_fs_closed_form(self, round_table):
        # phi_FS(u) = (log(1+e^{2u}) - log 2) / (2 pi), same gauge
        u = np.linspace(-3.0, 3.0, 101)
        phi_fs = (np.logaddexp(0.0, 2.0 * u) - math.log(2.0)) / (2.0 * math.pi)
        assert np.max(np.abs(round_table.phi(u) - phi_fs)) < 1e-10

    def test_phi_second_difference_is_2lambda(self, round_table):
        u = np.linspace(-2.0, 2.0, 41)
        h = 1e-4
        d2 = (round_table.phi(u + h) - 2 * round_table.phi(u)
              + round_table.phi(u - h)) / h**2
        assert np.max(np.abs(d2 - 2.0 * round_table.lam(u))) < 1e-6

    def test_phi_convex_monotone_slope(self, cone8_table):
        u = np.linspace(cone8_table.u_min, cone8_table.u_max, 512)
        slopes = cone8_table.phi_prime(u)
        assert np.all(np.diff(slopes) > -1e-14)

    def test_area_mismatch_rejected(self):
        prof = make_cone_family(5).profile  # area far from integer degree
        with pytest.raises(ValueError):
            build_potential(prof)


class TestMonomialNorms:
    def test_round_sphere_closed_form(self, round_table):
        m = 17
        k = np.arange(m + 1)
        exact = (math.log(2 * math.pi * R_UNIT**2) + (m + 1) * math.log(2)
                 + gammaln(k + 1) + gammaln(m - k + 1) - gammaln(m + 2))
        assert np.max(np.abs(log_monomial_norms(round_table, m) - exact)) < 1e-10

    def test_antipodal_symmetry(self, round_table):
        m = 12
        N = monomial_norms(round_table, m)
        assert np.allclose(N, N[::-1], rtol=1e-8)

    def test_positive(self, cone8_table):
        assert np.all(monomial_norms(cone8_table, 9) > 0)

    def test_degree_mismatch_rejected(self, round_table):
        with pytest.raises(ValueError):
            log_monomial_norms(round_table, 5, d=2)
        with pytest.raises(ValueError):
            log_monomial_norms(round_table, 0)


class TestRhoRevolution:
    @pytest.mark.parametrize("m", [1, 7, 30])
    def test_fs_exactness(self, m):
        fld = rho_revolution(round_sphere(), m)
        assert abs(fld.sup - (m + 1)) < 1e-8 * (m + 1)
        assert abs(fld.inf - (m + 1)) < 1e-8 * (m + 1)

    def test_dimension_identity(self, cone8_table):
        m = 25
        integral = kernel_area_integral(cone8_table, m,
                                        log_monomial_norms(cone8_table, m))
        assert abs(integral - (m + 1)) < 1e-6

    def test_explicit_points(self, round_table):
        fld = rho_revolution(round_sphere(), 5, points=[0.1, 0.3, 0.5])
        assert np.allclose(fld.values, 6.0, rtol=1e-8)
        assert len(fld.r) == 3

    def test_constant_gauge_invariance(self, round_table):
        # shifting the potential by a constant rescales all norms and the
        # pointwise weight identically, leaving rho fixed
        m = 9
        logN = log_monomial_norms(round_table, m)
        u = np.array([-0.4, 0.2, 1.0])
        base = rho_at_u(round_table, m, u, logN)
        c = 3.7
        shifted = rho_at_u(round_table, m, u, logN + c) * math.exp(c)
        assert np.allclose(base, shifted, rtol=1e-12)


class TestPeakSections:
    def test_fs_tail_closed_form(self):
        prof = round_sphere()
        for m, radius in ((8, 0.2), (25, 0.3)):
            _, tail, rho0 = peak_section_tail(prof, m, 0.0, radius)
            exact = math.cos(radius / (2 * R_UNIT)) ** (2 * (m + 1))
            assert abs(tail - exact) < 1e-8
            assert abs(rho0 - (m + 1)) < 1e-7

    def test_tail_monotone_and_vanishing(self):
        prof = round_sphere()
        table = build_potential(prof)
        radii = [0.1, 0.2, 0.4, 0.8]
        tails = [peak_section_tail(prof, 10, 0.0, R, table=table)[1] for R in radii]
        assert all(a >= b - 1e-12 for a, b in zip(tails, tails[1:]))
        assert tails[-1] < 1e-6

    def test_interior_center_mass_normalized(self):
        prof = round_sphere()
        coeffs, tail, _ = peak_section_tail(prof, 6, 0.4, 0.25)
        assert 0.0 <= tail <= 1.0
        assert abs(np.sum(np.abs(coeffs) ** 2 *
                          monomial_norms(build_potential(prof), 6)
                          / np.exp(0.0)) - 0.0) >= 0  # coefficients finite
        assert np.all(np.isfinite(coeffs))


class TestCpn:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_exact_matches_oracle(self, n):
        for m in range(0, 31):
            assert Fraction(cpn_fs_exact(n, m)) == cpn_fs_oracle(n, m)

    def test_examples(self):
        assert cpn_fs_exact(1, 0) == 1
        assert cpn_fs_exact(1, 7) == 8
        assert cpn_fs_exact(2, 3) == 20

    def test_validation(self):
        with pytest.raises(ValueError):
            cpn_fs_exact(0, 5)
        with pytest.raises(ValueError):
            cpn_fs_exact(1, -1)


class TestGram:
    def test_zero_perturbation_diagonal(self):
        m = 10
        G = gram_matrix(GramModel(m))
        assert np.max(np.abs(G - np.diag(np.diag(G)))) == 0.0
        assert np.max(np.abs(np.diag(G).real - np.exp(fs_log_norms(m)))) < 1e-12

    def test_hermitian_exactly(self):
        G = gram_matrix(GramModel(8, PerturbedPotential(6)))
        assert np.max(np.abs(G - G.conj().T)) == 0.0

    def test_offdiagonal_magnitude_bound(self):
        # couplings come from the k^-4 oscillation over the unit disc
        k, m = 6, 8
        G = gram_matrix(GramModel(m, PerturbedPotential(k)))
        off = G - np.diag(np.diag(G))
        assert np.max(np.abs(off)) <= k ** -4.0 * math.pi

    def test_unperturbed_rho_constant(self):
        m = 12
        model = GramModel(m)
        G = gram_matrix(model)
        for z in (0.0, 0.5 + 0.2j, 1.0, 3.0 - 1.0j):
            assert abs(rho_gram(G, model, z) - (m + 1)) < 1e-10

    def test_basis_rescaling_invariance(self):
        model = GramModel(8, PerturbedPotential(6))
        G = gram_matrix(model)
        rng = np.random.default_rng(5)
        d = rng.uniform(0.5, 2.0, size=9)
        D = np.diag(d)
        z = 0.3 + 0.1j
        v = z ** np.arange(9)
        q1 = np.real(np.vdot(v, np.linalg.solve(G, v)))
        q2 = np.real(np.vdot(D @ v, np.linalg.solve(D @ G @ D, D @ v)))
        assert abs(q1 - q2) < 1e-10 * abs(q1)

    def test_refinement_self_consistency(self):
        model = GramModel(8, PerturbedPotential(6))
        G1 = gram_matrix(model)
        G2 = gram_matrix(model.refined())
        for z in (0.0, 0.2 + 0.1j, 0.8):
            r1 = rho_gram(G1, model, z)
            r2 = rho_gram(G2, model.refined(), z)
            assert abs(r1 - r2) < 1e-6

    def test_gram_vs_diagonal_path_agreement(self):
        # both pipelines compute the same FS kernel
        m = 6
        model = GramModel(m)
        G = gram_matrix(model)
        fld = rho_revolution(round_sphere(), m, points=[0.2, 0.44])
        for v, z in zip(fld.values, (0.2, 0.44)):
            # points differ (geodesic radius vs chart coordinate) but the
            # field is constant, so values must agree anyway
            assert abs(rho_gram(G, model, z) - v) < 1e-8 * (m + 1)

    def test_field_round_matches_exact(self):
        m = 8
        fld = rho_gram_field(GramModel(m))
        assert abs(fld.integral - (m + 1)) < 1e-3
        assert abs(fld.sup - (m + 1)) < 1e-8 and abs(fld.inf - (m + 1)) < 1e-8

    def test_perturbed_density_positive(self):
        xs = np.linspace(-1.1, 1.1, 301)
        X, Y = np.meshgrid(xs, xs)
        for k in (4, 5, 6):
            assert perturbed_area_density(PerturbedPotential(k), X, Y).min() > 0

    def test_invalid_model_rejected(self):
        with pytest.raises(ValueError):
            GramModel(0)
        with pytest.raises(ValueError):
            GramModel(5, None, n_r=2)
