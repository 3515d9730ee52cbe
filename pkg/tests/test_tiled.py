import numpy as np
import pytest

from tridax import (InvalidTilePlan, MismatchedTiles, TilePlan, TridiagonalSystem,
                    assemble_reduced, back_substitute, dense_oracle_solve,
                    modified_thomas_phase, relative_inf_error, thomas_pcr_solve,
                    thomas_solve, thomas_thomas_solve)
from tridax.tiled import tile_system
from conftest import make_system


def identity_system(n, d=None):
    d = np.arange(1.0, n + 1) if d is None else np.asarray(d, dtype=float)
    return TridiagonalSystem(np.zeros(n), np.ones(n), np.zeros(n), d)


class TestTilePlan:
    def test_even_division(self):
        plan = TilePlan(12, 3)
        assert plan.m == 4
        assert plan.sizes == (4, 4, 4)
        assert plan.reduced_size == 6
        assert plan.boundary_indices() == [0, 3, 4, 7, 8, 11]

    def test_uneven_last_tile_shorter(self):
        plan = TilePlan(11, 3)
        assert plan.sizes == (4, 4, 3)

    def test_rejects_tiny_tiles(self):
        with pytest.raises(InvalidTilePlan):
            TilePlan(8, 4)  # m = 2
        with pytest.raises(InvalidTilePlan):
            TilePlan(10, 3)  # last tile = 2
        with pytest.raises(InvalidTilePlan):
            TilePlan(12, 1)


class TestModifiedPhase:
    def test_identity_tile(self):
        d = np.array([3.0, 1.0, 4.0, 1.0, 5.0])
        res = modified_thomas_phase(np.zeros(5), np.ones(5), np.zeros(5), d)
        assert np.array_equal(res.a_star, np.zeros(5))
        assert np.array_equal(res.c_star, np.zeros(5))
        assert np.array_equal(res.d_star, d)

    def test_purity(self):
        s = make_system(9, seed=2)
        r1 = modified_thomas_phase(s.a, s.b, s.c, s.d)
        r2 = modified_thomas_phase(s.a, s.b, s.c, s.d)
        assert np.array_equal(r1.d_star, r2.d_star)
        assert np.array_equal(r1.a_star, r2.a_star)

    def test_interior_two_unknown_form(self):
        # interior rows must reproduce the oracle solution from the two
        # boundary unknowns of the same tile
        s = make_system(12, seed=12)
        u = dense_oracle_solve(s)
        plan = TilePlan(12, 3)
        tiles = tile_system(s, plan)
        for k, tile in enumerate(tiles):
            off = plan.offsets[k]
            size = plan.sizes[k]
            u0, um = u[off], u[off + size - 1]
            for i in range(1, size - 1):
                rec = tile.d_star[i] - tile.a_star[i] * u0 - tile.c_star[i] * um
                assert rec == pytest.approx(u[off + i], abs=1e-12)

    def test_too_small_tile_rejected(self):
        with pytest.raises(InvalidTilePlan):
            modified_thomas_phase(np.zeros(2), np.ones(2), np.zeros(2), np.ones(2))


class TestAssembleReduced:
    def test_identity_reduced_is_identity(self):
        s = identity_system(9)
        tiles = tile_system(s, TilePlan(9, 3))
        red = assemble_reduced(tiles)
        assert np.array_equal(red.b, np.ones(6))
        assert np.array_equal(red.a, np.zeros(6))
        assert np.array_equal(red.c, np.zeros(6))
        assert np.array_equal(red.d, s.d[[0, 2, 3, 5, 6, 8]])

    def test_reduced_matches_oracle_boundaries(self):
        s = make_system(12, seed=40)
        plan = TilePlan(12, 3)
        tiles = tile_system(s, plan)
        boundary = thomas_solve(assemble_reduced(tiles))
        full = dense_oracle_solve(s)
        assert relative_inf_error(boundary, full[plan.boundary_indices()]) <= 1e-12

    def test_minimal_two_tiles_structure(self):
        s = make_system(6, seed=41)
        red = assemble_reduced(tile_system(s, TilePlan(6, 2)))
        assert red.n == 4
        assert red.a[0] == 0.0 and red.c[-1] == 0.0

    def test_out_of_order_tiles_rejected(self):
        s = make_system(12, seed=42)
        tiles = tile_system(s, TilePlan(12, 3))
        with pytest.raises(MismatchedTiles):
            assemble_reduced(tiles[::-1])
        with pytest.raises(MismatchedTiles):
            assemble_reduced(tiles[:1])


class TestBackSubstitute:
    def test_identity_returns_rhs(self):
        s = identity_system(8, d=[2, 7, 1, 8, 2, 8, 1, 8])
        tiles = tile_system(s, TilePlan(8, 2))
        boundary = thomas_solve(assemble_reduced(tiles))
        assert np.array_equal(back_substitute(tiles, boundary), s.d)

    def test_matches_oracle_everywhere(self):
        s = make_system(12, seed=43)
        tiles = tile_system(s, TilePlan(12, 3))
        u = back_substitute(tiles, thomas_solve(assemble_reduced(tiles)))
        assert relative_inf_error(u, dense_oracle_solve(s)) <= 1e-12

    def test_zero_rhs_gives_zero(self):
        s = make_system(12, seed=44)
        zeroed = TridiagonalSystem(s.a, s.b, s.c, np.zeros(12))
        tiles = tile_system(zeroed, TilePlan(12, 3))
        u = back_substitute(tiles, thomas_solve(assemble_reduced(tiles)))
        assert np.max(np.abs(u)) == 0.0

    def test_boundary_length_check(self):
        s = make_system(12, seed=45)
        tiles = tile_system(s, TilePlan(12, 3))
        with pytest.raises(MismatchedTiles):
            back_substitute(tiles, np.zeros(5))


class TestHybridSolvers:
    def test_matches_monolithic_256(self):
        s = make_system(256, seed=256)
        ref = thomas_solve(s)
        assert relative_inf_error(thomas_thomas_solve(s, 4), ref) <= 1e-10
        assert relative_inf_error(thomas_pcr_solve(s, 4), ref) <= 1e-10

    def test_invalid_plan_rejected(self):
        s = make_system(8, seed=1)
        with pytest.raises(InvalidTilePlan):
            thomas_thomas_solve(s, 4)

    def test_smallest_legal_case(self):
        s = make_system(6, seed=60)
        ref = dense_oracle_solve(s)
        assert relative_inf_error(thomas_thomas_solve(s, 2), ref) <= 1e-12
        assert relative_inf_error(thomas_pcr_solve(s, 2), ref) <= 1e-12

    def test_identity_exact(self):
        s = identity_system(16)
        assert np.array_equal(thomas_thomas_solve(s, 4), s.d)
        assert np.array_equal(thomas_pcr_solve(s, 4), s.d)

    @pytest.mark.parametrize("n", [6, 24, 100, 333, 1024])
    @pytest.mark.parametrize("t", [2, 3, 4, 8, 16])
    def test_tiling_invariance(self, n, t):
        try:
            TilePlan(n, t)
        except InvalidTilePlan:
            pytest.skip(f"t={t} does not tile n={n}")
        s = make_system(n, seed=n * 31 + t)
        ref = thomas_solve(s)
        assert relative_inf_error(thomas_thomas_solve(s, t), ref) <= 1e-12
        assert relative_inf_error(thomas_pcr_solve(s, t), ref) <= 1e-12
