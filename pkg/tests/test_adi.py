import numpy as np
import pytest

from tridax import (AdiConfig, Mesh, Precision, ZeroDuration, adi_rhs, adi_run,
                    adi_step, effective_bandwidth)
from tridax.adi import logical_bytes_per_iteration
from tridax.reference import naive_adi_run


def interior_random(dims, batch=1, seed=0, precision=Precision.FP64):
    """Zero-boundary mesh with seeded random interior values."""
    mesh = Mesh.zeros(dims, batch=batch, precision=precision)
    rng = np.random.default_rng(seed)
    if mesh.spatial_ndim == 2:
        inner = mesh.data[:, :, 1:-1, 1:-1]
    else:
        inner = mesh.data[:, 1:-1, 1:-1, 1:-1]
    inner[:] = rng.uniform(-1, 1, inner.shape).astype(mesh.data.dtype)
    return mesh


def full_random(dims, batch=1, seed=0, precision=Precision.FP64):
    mesh = Mesh.zeros(dims, batch=batch, precision=precision)
    rng = np.random.default_rng(seed)
    mesh.data[:] = rng.uniform(-1, 1, mesh.data.shape).astype(mesh.data.dtype)
    return mesh


class TestRhs:
    def test_constant_field_zero(self):
        mesh = Mesh.zeros((8, 8, 8))
        mesh.data[:] = 4.25
        _, d = adi_rhs(mesh, AdiConfig(gamma=0.5, n_iter=1))
        assert np.all(d.data == 0)

    def test_linear_field_zero_second_difference(self):
        mesh = Mesh.zeros((8, 3, 3))
        for i in range(8):
            mesh.data[:, :, :, i] = i
        _, d = adi_rhs(mesh, AdiConfig(gamma=0.5, n_iter=1))
        assert np.all(d.data == 0)

    def test_matches_loop_oracle_bitwise(self):
        mesh = full_random((8, 8, 8), seed=88)
        gamma = 0.37
        _, d = adi_rhs(mesh, AdiConfig(gamma=gamma, n_iter=1))
        u = mesh.data
        expected = np.zeros_like(u)
        for k in range(1, 7):
            for j in range(1, 7):
                for i in range(1, 7):
                    ctr = u[0, k, j, i]
                    acc = (u[0, k, j, i - 1] - 2.0 * ctr) + u[0, k, j, i + 1]
                    acc = acc + ((u[0, k, j - 1, i] - 2.0 * ctr) + u[0, k, j + 1, i])
                    acc = acc + ((u[0, k - 1, j, i] - 2.0 * ctr) + u[0, k + 1, j, i])
                    expected[0, k, j, i] = gamma * acc
        assert np.array_equal(d.data, expected)

    def test_boundary_rows_zero(self):
        mesh = full_random((6, 6, 6), seed=3)
        _, d = adi_rhs(mesh, AdiConfig(gamma=1.0, n_iter=1))
        assert np.all(d.data[:, 0] == 0) and np.all(d.data[:, -1] == 0)
        assert np.all(d.data[:, :, 0] == 0) and np.all(d.data[:, :, -1] == 0)
        assert np.all(d.data[:, :, :, 0] == 0) and np.all(d.data[:, :, :, -1] == 0)

    def test_rejects_non_finite(self):
        mesh = Mesh.zeros((4, 4))
        mesh.data[0, 0, 1, 1] = np.nan
        with pytest.raises(ValueError):
            adi_rhs(mesh, AdiConfig(gamma=0.5, n_iter=1))


class TestStep:
    def test_zero_is_fixed_point(self):
        u = Mesh.zeros((6, 6, 6))
        u1, d = adi_step(u, AdiConfig(gamma=0.5, n_iter=1))
        assert np.all(u1.data == 0) and np.all(d.data == 0)

    def test_matches_naive_reference_12cubed(self):
        u0 = full_random((12, 12, 12), seed=5)
        got, _ = adi_step(u0, AdiConfig(gamma=0.5, n_iter=1))
        ref = naive_adi_run(u0.data, 0.5, 1)
        assert np.max(np.abs(got.data - ref)) <= 1e-12

    def test_small_extent_rejected(self):
        with pytest.raises(ValueError):
            adi_step(Mesh.zeros((3, 8, 8)), AdiConfig(gamma=0.5, n_iter=1))

    def test_monotone_decay_sweep(self):
        # zero-boundary diffusion never grows the max-norm for gamma <= 1;
        # any violation is a failure
        rng = np.random.default_rng(99)
        for trial in range(100):
            gamma = float(rng.uniform(0.05, 1.0)) if trial % 2 else 1.0
            u = interior_random((8, 8, 8), seed=trial)
            u1, _ = adi_step(u, AdiConfig(gamma=gamma, n_iter=1))
            assert u1.max_abs() <= u.max_abs(), (trial, gamma)

    def test_2d_path_skips_z(self):
        u0 = full_random((16, 16), seed=6)
        got, _ = adi_step(u0, AdiConfig(gamma=0.5, n_iter=1))
        ref = naive_adi_run(u0.data, 0.5, 1)
        assert np.max(np.abs(got.data - ref)) <= 1e-12


class TestRun:
    def test_n_iter_zero_rejected(self):
        with pytest.raises(ValueError):
            AdiConfig(gamma=0.5, n_iter=0)

    def test_decay_matches_reference_threshold(self):
        # 100 zero-boundary iterations: monotone decay, final norm equal to
        # the plain-loop reference's
        u0 = interior_random((16, 16, 16), seed=7)
        start = u0.max_abs()
        u, report = adi_run(u0, AdiConfig(gamma=0.5, n_iter=100))
        deltas = report.delta_inf
        assert len(deltas) == 100
        ref = naive_adi_run(u0.data, 0.5, 100)
        assert np.max(np.abs(u.data - ref)) <= 1e-12
        assert u.max_abs() < start

    def test_norm_non_increasing_over_run(self):
        u = interior_random((12, 12, 12), seed=8)
        cfg = AdiConfig(gamma=0.5, n_iter=1)
        prev = u.max_abs()
        for _ in range(50):
            u, _ = adi_step(u, cfg)
            now = u.max_abs()
            assert now <= prev
            prev = now

    def test_cross_precision_agreement(self):
        u0 = full_random((32, 32, 32), seed=9)
        cfg64 = AdiConfig(gamma=0.5, n_iter=100, precision=Precision.FP64)
        cfg32 = AdiConfig(gamma=0.5, n_iter=100, precision=Precision.FP32)
        u64, _ = adi_run(u0, cfg64)
        u32, _ = adi_run(u0.astype(Precision.FP32), cfg32)
        scale = max(1.0, float(np.max(np.abs(u64.data))))
        err = float(np.max(np.abs(u32.data.astype(np.float64) - u64.data))) / scale
        assert err <= 1e-4

    def test_batch_independence_bitwise(self):
        batched = full_random((10, 10, 10), batch=3, seed=10)
        cfg = AdiConfig(gamma=0.5, n_iter=3)
        whole, _ = adi_run(batched, cfg)
        for b in range(3):
            single = Mesh(batched.data[b:b + 1].copy(), 3)
            alone, _ = adi_run(single, cfg)
            assert np.array_equal(alone.data[0], whole.data[b])

    def test_report_accounting(self):
        u0 = interior_random((8, 8, 8), seed=11)
        _, report = adi_run(u0, AdiConfig(gamma=0.5, n_iter=4))
        mesh_bytes = u0.nbytes
        assert report.phase("rhs").bytes == 4 * 2 * mesh_bytes
        for ax in "xyz":
            assert report.phase(f"sweep_{ax}").bytes == 4 * 2 * mesh_bytes
        assert report.phase("update").bytes == 4 * 3 * mesh_bytes
        for stats in report.phases.values():
            if stats.seconds > 0:
                assert stats.gb_per_s == pytest.approx(
                    stats.bytes / stats.seconds / 1e9)
        payload = report.to_dict()
        assert payload["schema_version"] == "tridax.report.v1"
        assert payload["total_bytes"] == 4 * logical_bytes_per_iteration(
            u0.points, 8, 3)

    def test_unroll_only_affects_reporting(self):
        u0 = full_random((8, 8), seed=12)
        u1, r1 = adi_run(u0, AdiConfig(gamma=0.5, n_iter=6, unroll=1))
        u3, r3 = adi_run(u0, AdiConfig(gamma=0.5, n_iter=6, unroll=3))
        assert np.array_equal(u1.data, u3.data)
        assert len(r1.steps) == 6
        assert len(r3.steps) == 2

    def test_literal_coefficient_mode(self):
        u0 = full_random((8, 8), seed=13)
        cfg = AdiConfig(gamma=0.5, n_iter=2, literal_coefficients=True)
        got, _ = adi_run(u0, cfg)
        ref = naive_adi_run(u0.data, 0.5, 2, literal_coefficients=True)
        assert np.max(np.abs(got.data - ref)) <= 1e-12


class TestEffectiveBandwidth:
    def test_one_gb_per_second(self):
        assert effective_bandwidth(1e9, 1.0) == 1.0

    def test_zero_bytes(self):
        assert effective_bandwidth(0, 2.0) == 0.0

    def test_u280_peak_anchor(self):
        assert effective_bandwidth(460e9, 1.0) == 460.0

    def test_zero_duration_raises(self):
        with pytest.raises(ZeroDuration):
            effective_bandwidth(1.0, 0.0)
