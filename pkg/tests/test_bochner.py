"""The Bochner identity, the lambda inequality chain, and the pointwise
pinching bound."""

import numpy as np
import pytest

from bochnerlab.bochner import (
    bochner_residual,
    compute_bochner,
    integral_identity_residual,
    lambda_chain_check,
    pointwise_pinching_check,
    ricci_term_field,
    target_term_diagonal_field,
    target_term_field,
)
from bochnerlab.domains import FlatTorus2, RoundSphere2
from bochnerlab.errors import HypothesisViolationError, UsageError
from bochnerlab.maps import catalog_map, constant_map
from bochnerlab.targets import Euclidean, FlatTorusEmb, Sphere


def sphere_map(name, n1=64, r=1.0):
    dom = RoundSphere2(r=1.0, n1=n1, n2=2 * n1)
    return catalog_map(name, dom, Sphere(k=2, r=r))


class TestCurvatureTerms:
    def test_constant_map_Q_vanishes(self):
        f = constant_map(RoundSphere2(r=1.0, n1=16, n2=32), Sphere(k=2, r=1.0))
        data = compute_bochner(f)
        assert np.max(np.abs(data.Q)) == 0.0
        assert np.max(np.abs(data.residual)) < 1e-12

    def test_flat_target_reduces_to_ricci_term(self):
        dom = RoundSphere2(r=1.0, n1=32, n2=64)
        TH, PH = dom.chart_grid()
        vals = np.stack([np.sin(TH) * np.cos(PH), np.sin(TH) * np.sin(PH),
                         np.cos(TH)], axis=-1)
        from bochnerlab.maps import DiscreteMap

        for tgt in (Euclidean(m=3), FlatTorusEmb(radii=(1.0, 0.7))):
            if tgt.m == 3:
                f = DiscreteMap(dom, tgt, vals)
            else:
                continue
            assert np.max(np.abs(target_term_field(f))) < 1e-12
            np.testing.assert_allclose(
                compute_bochner(f).Q, ricci_term_field(f), atol=1e-12
            )

    def test_path_agreement_on_analytic_maps(self):
        # invariant contraction vs eigenframe sum over kept nodes
        for name in ("identity", "holomorphic:k=2"):
            f = sphere_map(name)
            keep = ~f.domain.flagged_mask()
            tt = target_term_field(f)
            ttf = target_term_diagonal_field(f)
            assert np.max(np.abs(tt - ttf)[keep]) < 1e-8

    def test_identity_map_Q_vanishes_to_grid_accuracy(self):
        # Ric term = target term for the identity (both equal 2/r^2 - ish)
        f = sphere_map("identity")
        keep = ~f.domain.flagged_mask()
        data = compute_bochner(f)
        h = max(f.domain.spacing)
        assert np.max(np.abs(data.Q)[keep]) < 10 * h * h


class TestResidual:
    @pytest.mark.parametrize("name", ["identity", "holomorphic:k=2"])
    def test_residual_second_order(self, name):
        sups = []
        for n1 in (32, 64):
            _, sup, _ = bochner_residual(sphere_map(name, n1=n1))
            sups.append(sup)
        assert 3.0 < sups[0] / sups[1] < 5.0

    def test_integral_identity_refines_with_order_above_1_5(self):
        vals = []
        for n1 in (32, 64, 128):
            f = sphere_map("holomorphic:k=2", n1=n1)
            vals.append(abs(integral_identity_residual(f)))
        orders = np.log2(np.array(vals[:-1]) / np.array(vals[1:]))
        assert np.all(orders > 1.5)


class TestLambdaChain:
    def test_random_vectors(self):
        rng = np.random.default_rng(0)
        for n in (2, 3, 5):
            for _ in range(1000):
                lam = rng.uniform(0.0, 3.0, size=n)
                chain = lambda_chain_check(lam)
                assert abs(chain.lhs - chain.mid) < 1e-12
                assert chain.bound_ok
                assert not chain.equality or np.ptp(lam) <= 1e-12

    def test_equality_iff_spread_vanishes(self):
        assert lambda_chain_check([1.3, 1.3, 1.3]).equality
        chain = lambda_chain_check([1.3, 1.3 + 1e-6, 1.3])
        assert not chain.equality
        # equality saturates the bound exactly
        eq = lambda_chain_check([2.0, 2.0])
        assert eq.mid == pytest.approx(eq.bound, abs=1e-14)

    def test_bound_constant_is_n_minus_1_over_2n(self):
        for n in (2, 3, 5):
            chain = lambda_chain_check(np.ones(n))
            S = float(n)
            assert chain.bound == pytest.approx((n - 1) / (2 * n) * S * S, abs=1e-14)

    def test_negative_input_rejected(self):
        with pytest.raises(UsageError):
            lambda_chain_check([1.0, -0.5])


class TestPointwisePinching:
    def test_constant_map_slack_zero(self):
        f = constant_map(RoundSphere2(r=1.0, n1=16, n2=32), Sphere(k=2, r=1.0))
        chk = pointwise_pinching_check(f, (8, 8), ric_min=1.0, sec_max=1.0)
        assert chk.Q == 0.0 and chk.bound == 0.0 and chk.slack == 0.0

    def test_identity_slack_near_zero(self):
        # every inequality in the chain saturates for the identity
        f = sphere_map("identity")
        chk = pointwise_pinching_check(f, (32, 20), ric_min=1.0, sec_max=1.0)
        assert abs(chk.bound) < 1e-2
        assert abs(chk.slack) < 1e-2

    def test_energy_form_identical(self):
        f = sphere_map("holomorphic:k=2", n1=32)
        for node in ((8, 8), (16, 40), (25, 3)):
            chk = pointwise_pinching_check(f, node, ric_min=1.0, sec_max=1.0)
            assert chk.bound == pytest.approx(chk.bound_energy_form, abs=1e-14)

    def test_holomorphic_slack_nonnegative(self):
        f = sphere_map("holomorphic:k=2", n1=32)
        keep = ~f.domain.flagged_mask()
        idx = np.argwhere(keep)[:: 50]
        for i, j in idx:
            chk = pointwise_pinching_check(f, (int(i), int(j)), 1.0, 1.0)
            assert chk.slack >= -1e-6

    def test_negative_sec_max_flagged(self):
        f = sphere_map("identity", n1=32)
        with pytest.raises(HypothesisViolationError):
            pointwise_pinching_check(f, (8, 8), ric_min=1.0, sec_max=-0.5)
        chk = pointwise_pinching_check(
            f, (8, 8), ric_min=1.0, sec_max=-0.5, require_hypothesis=False
        )
        assert chk.slack <= 0.0  # bound exceeds Q once sec flips sign


class TestFlatDomainCatalog:
    def test_cap_hessian_positive_inside(self):
        # non-harmonic datum: |H|^2 > 0 at interior nodes
        dom = FlatTorus2(a=1, b=1, n1=32, n2=32)
        f = catalog_map("cap:amplitude=0.3", dom, Sphere(k=2, r=1.0))
        data = compute_bochner(f)
        assert np.min(data.hess) > 0.0
