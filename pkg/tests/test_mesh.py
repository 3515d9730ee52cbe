import numpy as np
import pytest

from tridax import (Axis, LineSolveError, Mesh, Precision, TridiagonalSystem,
                    block_transpose, gather_lines, line_batch_view, read_mesh,
                    scatter_lines, solve_lines, thomas_solve, write_mesh)
from tridax.mesh import ConstantLineCoefficients, StoredCoefficients, line_indices


def dominant_profile(seed):
    def profile(n, dtype):
        rng = np.random.default_rng(seed + n)
        a = rng.uniform(-1, 1, n).astype(dtype)
        c = rng.uniform(-1, 1, n).astype(dtype)
        a[0] = c[-1] = 0
        b = (np.abs(a) + np.abs(c) + dtype.type(1.5)).astype(dtype)
        return a, b, c
    return ConstantLineCoefficients(profile)


def random_mesh(dims, batch=1, seed=0, precision=Precision.FP64):
    mesh = Mesh.zeros(dims, batch=batch, precision=precision)
    rng = np.random.default_rng(seed)
    mesh.data[:] = rng.standard_normal(mesh.data.shape).astype(mesh.data.dtype)
    return mesh


class TestLineCounting:
    def test_x_lines_4x3x2(self):
        view = line_batch_view(Mesh.zeros((4, 3, 2)), "x")
        assert view.system_size == 4
        assert view.system_count == 6

    def test_z_lines_4x3x2(self):
        view = line_batch_view(Mesh.zeros((4, 3, 2)), "z")
        assert view.system_size == 2
        assert view.system_count == 12

    def test_line_count_law(self):
        mesh = Mesh.zeros((5, 7, 3), batch=4)
        for axis in "xyz":
            view = line_batch_view(mesh, axis)
            assert view.system_count == mesh.points // view.system_size

    def test_2d_has_no_z(self):
        with pytest.raises(ValueError):
            line_batch_view(Mesh.zeros((4, 4)), "z")


class TestGatherScatter:
    @pytest.mark.parametrize("axis", ["x", "y", "z"])
    def test_round_trip_bit_exact(self, axis):
        mesh = random_mesh((5, 4, 3), batch=2, seed=9)
        snapshot = mesh.data.copy()
        scatter_lines(mesh, axis, list(gather_lines(mesh, axis)))
        assert np.array_equal(mesh.data, snapshot)

    def test_gather_order_x_contiguous(self):
        mesh = Mesh.zeros((4, 2, 2))
        mesh.data.flat = np.arange(mesh.points)
        first = next(gather_lines(mesh, "x"))
        assert np.array_equal(first, [0, 1, 2, 3])

    def test_line_indices_cover_mesh(self):
        mesh = Mesh.zeros((3, 4, 5), batch=2)
        for axis in "xyz":
            idx = list(line_indices(mesh, axis))
            assert len(idx) == line_batch_view(mesh, axis).system_count
            assert len(set(idx)) == len(idx)


class TestBlockTranspose:
    def test_identity_for_v1(self):
        tile = np.array([[4.0]])
        assert np.array_equal(block_transpose(tile), tile)

    def test_hand_2x2(self):
        out = block_transpose(np.array([[1.0, 2.0], [3.0, 4.0]]))
        assert np.array_equal(out, [[1.0, 3.0], [2.0, 4.0]])

    def test_involution_v8(self):
        tile = np.random.default_rng(8).standard_normal((8, 8))
        assert np.array_equal(block_transpose(block_transpose(tile)), tile)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            block_transpose(np.ones((2, 3)))


class TestSolveLines:
    def test_identity_lines_leave_mesh_unchanged(self):
        mesh = random_mesh((8, 8, 8), seed=1)
        ident = ConstantLineCoefficients(
            lambda n, dt: (np.zeros(n, dt), np.ones(n, dt), np.zeros(n, dt)))
        out = solve_lines(mesh, ident, "y", group=4, width=2)
        assert np.array_equal(out.data, mesh.data)

    @pytest.mark.parametrize("axis", ["x", "y", "z"])
    def test_matches_per_line_scalar_solve(self, axis):
        mesh = random_mesh((16, 16, 16), seed=2)
        coeffs = dominant_profile(5)
        a, b, c = coeffs.line_block(mesh, Axis.parse(axis), [(0, 0, 0)])
        expected = mesh.copy()
        per_line = [thomas_solve(TridiagonalSystem(a[0], b[0], c[0], line))
                    for line in gather_lines(mesh, axis)]
        scatter_lines(expected, axis, per_line)
        got = solve_lines(mesh, coeffs, axis, group=32, width=8)
        assert np.max(np.abs(got.data - expected.data)) <= 1e-12

    @pytest.mark.parametrize("group", [1, 4, 8, 32])
    @pytest.mark.parametrize("width", [1, 2, 8])
    def test_blocking_invariance_bitwise(self, group, width):
        mesh = random_mesh((16, 8, 4), batch=2, seed=3)
        coeffs = dominant_profile(6)
        base = solve_lines(mesh, coeffs, "x", group=1, width=1)
        out = solve_lines(mesh, coeffs, "x", group=group, width=width)
        assert np.array_equal(out.data, base.data)

    def test_pcr_algo_agrees_with_thomas(self):
        mesh = random_mesh((16, 4, 4), seed=4)
        coeffs = dominant_profile(7)
        th = solve_lines(mesh, coeffs, "x", "thomas", group=8, width=2)
        pc = solve_lines(mesh, coeffs, "x", "pcr", group=8, width=2)
        assert np.max(np.abs(th.data - pc.data)) <= 1e-12

    def test_in_place_destination(self):
        mesh = random_mesh((8, 4, 4), seed=5)
        coeffs = dominant_profile(8)
        expected = solve_lines(mesh, coeffs, "x")
        out = solve_lines(mesh, coeffs, "x", out=mesh)
        assert out is mesh
        assert np.array_equal(mesh.data, expected.data)

    def test_threads_do_not_change_results(self):
        mesh = random_mesh((16, 8, 2), seed=6)
        coeffs = dominant_profile(9)
        base = solve_lines(mesh, coeffs, "y", group=4, width=2)
        threaded = solve_lines(mesh, coeffs, "y", group=4, width=2, threads=4)
        assert np.array_equal(base.data, threaded.data)

    def test_stored_coefficients_match_generated(self):
        mesh = random_mesh((12, 6, 3), seed=7)
        gen = dominant_profile(10)
        a, b, c = gen.line_block(mesh, Axis.X, list(line_indices(mesh, Axis.X)))
        def to_mesh(rows):
            m = Mesh.zeros(mesh.dims, batch=mesh.batch)
            scatter_lines(m, "x", rows)
            return m
        stored = StoredCoefficients(to_mesh(a), to_mesh(b), to_mesh(c))
        assert stored.is_stored and not gen.is_stored
        out_g = solve_lines(mesh, gen, "x")
        out_s = solve_lines(mesh, stored, "x")
        assert np.array_equal(out_g.data, out_s.data)

    def test_failing_line_identified(self):
        mesh = random_mesh((6, 2, 2), batch=2, seed=8)
        singular = ConstantLineCoefficients(
            lambda n, dt: (np.zeros(n, dt), np.zeros(n, dt), np.zeros(n, dt)))
        with pytest.raises(LineSolveError) as err:
            solve_lines(mesh, singular, "x", group=2, width=1)
        assert err.value.axis == "x"
        assert err.value.batch == 0


class TestMeshIo:
    def test_3d_round_trip(self, tmp_path):
        mesh = random_mesh((9, 5, 4), batch=3, seed=11)
        path = tmp_path / "m.bin"
        write_mesh(path, mesh)
        back = read_mesh(path)
        assert back.dims == (9, 5, 4)
        assert back.batch == 3
        assert np.array_equal(back.data, mesh.data)

    def test_2d_fp32_round_trip(self, tmp_path):
        mesh = random_mesh((6, 7), batch=2, seed=12, precision=Precision.FP32)
        path = tmp_path / "m32.bin"
        write_mesh(path, mesh)
        back = read_mesh(path)
        assert back.spatial_ndim == 2
        assert back.precision is Precision.FP32
        assert np.array_equal(back.data, mesh.data)

    def test_header_is_32_bytes_with_magic(self, tmp_path):
        path = tmp_path / "m.bin"
        write_mesh(path, Mesh.zeros((2, 2)))
        raw = path.read_bytes()
        assert raw[:8] == b"TRIDAX01"
        assert len(raw) == 32 + 4 * 8

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"NOTAMESH" + b"\0" * 40)
        with pytest.raises(ValueError):
            read_mesh(path)

    def test_truncated_payload_rejected(self, tmp_path):
        path = tmp_path / "m.bin"
        write_mesh(path, Mesh.zeros((4, 4)))
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(ValueError):
            read_mesh(path)
