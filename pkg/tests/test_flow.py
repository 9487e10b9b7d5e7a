"""Heat flow: energy monotonicity, stopping conditions, diameter helper."""

import numpy as np
import pytest

from bochnerlab.domains import FlatTorus2, RoundSphere2
from bochnerlab.errors import UsageError
from bochnerlab.flow import (
    FlowParams,
    auto_dt,
    flow_step,
    image_diameter,
    run_flow,
)
from bochnerlab.maps import catalog_map, total_energy
from bochnerlab.targets import Sphere


def cap(n=32, amplitude=0.3):
    dom = FlatTorus2(a=1, b=1, n1=n, n2=n)
    return catalog_map(f"cap:amplitude={amplitude}", dom, Sphere(k=2, r=1.0))


class TestStep:
    def test_energy_decreases_on_first_step(self):
        f = cap()
        e0 = total_energy(f)
        f1, dt, e1 = flow_step(f, auto_dt(f))
        assert e1 < e0
        assert dt > 0

    def test_oversized_step_is_halved_not_fatal(self):
        # a rough map into flat space makes the oversized explicit step
        # unstable (no reprojection damping), forcing the controller to halve
        from bochnerlab.maps import DiscreteMap
        from bochnerlab.targets import Euclidean

        dom = FlatTorus2(a=1, b=1, n1=32, n2=32)
        rng = np.random.default_rng(0)
        f = DiscreteMap(dom, Euclidean(m=3), rng.standard_normal((32, 32, 3)))
        dt_big = 1.0  # far beyond the explicit stability limit ~ h^2/4
        _, dt_acc, e1 = flow_step(f, dt_big)
        assert dt_acc < dt_big
        assert e1 <= total_energy(f) + 1e-10

    def test_nonpositive_dt_rejected(self):
        with pytest.raises(UsageError):
            flow_step(cap(), 0.0)

    def test_step_stays_on_target(self):
        f1, _, _ = flow_step(cap(), auto_dt(cap()))
        assert f1.max_constraint_residual() < 1e-12


class TestRun:
    def test_cap_collapses_to_constant(self):
        f, summary = run_flow(cap(), FlowParams(max_steps=5000))
        assert summary.outcome == "collapsed_to_constant"
        assert summary.final_diameter < 1e-3
        energies = np.asarray(summary.energies)
        assert np.all(np.diff(energies) <= 1e-10)

    def test_harmonic_start_converges_immediately(self):
        dom = RoundSphere2(r=1.0, n1=32, n2=64)
        f0 = catalog_map("identity", dom, Sphere(k=2, r=1.0))
        # tension of the discrete identity is pure O(h^2) noise; with a
        # tolerance above that level the flow stops at step zero
        f, summary = run_flow(f0, FlowParams(tension_tol=1e-2, max_steps=10))
        assert summary.outcome == "converged"
        assert summary.steps == 0

    def test_max_steps_outcome(self):
        f, summary = run_flow(cap(), FlowParams(max_steps=3))
        assert summary.outcome == "max_steps"
        assert summary.steps == 3

    def test_trace_records_snapshots(self):
        f, summary = run_flow(
            cap(), FlowParams(max_steps=20, snapshot_stride=5)
        )
        assert len(summary.trace) == 4
        steps = [row[0] for row in summary.trace]
        assert steps == [0, 5, 10, 15]

    def test_invalid_params_rejected(self):
        with pytest.raises(UsageError):
            FlowParams(dt=-1.0)
        with pytest.raises(UsageError):
            FlowParams(tension_tol=0.0)
        with pytest.raises(UsageError):
            FlowParams(max_steps=0)


class TestDiameter:
    def test_exact_on_small_sets(self):
        rng = np.random.default_rng(0)
        pts = rng.standard_normal((200, 3))
        d2 = np.sum((pts[:, None] - pts[None]) ** 2, axis=-1)
        assert image_diameter(pts) == pytest.approx(np.sqrt(d2.max()))

    def test_sweep_matches_exact_on_sphere_samples(self):
        # the sweep path (large inputs) agrees with the exact pairwise
        # scan on a round set
        rng = np.random.default_rng(1)
        pts = rng.standard_normal((6000, 3))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        exact = image_diameter(pts, exact_limit=10000)  # exact pairwise
        swept = image_diameter(pts)  # sweep path (default limit 4096)
        assert swept <= exact + 1e-12  # sweeps never overshoot
        assert swept == pytest.approx(exact, abs=1e-3)

    def test_accepts_maps(self):
        f = cap()
        assert image_diameter(f) <= 0.6 + 1e-6
