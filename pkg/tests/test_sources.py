"""Tests for source models and block density construction."""

import numpy as np
import pytest

from qsource.linalg import partial_trace
from qsource.sources import (
    DensityMatrix,
    KrausSource,
    SizeCapExceeded,
    correlated_source,
    example1_source,
    fcs_density,
    marginal_consistency,
    maximally_mixed_source,
    product_density,
    product_source,
    random_source,
    source_fingerprint,
    source_from_json,
    source_to_json,
    validate_source,
)


class TestExampleSource:
    def test_constants(self):
        src = example1_source()
        s = 1.0 / np.sqrt(2.0)
        assert src.d == 3 and src.k == 2
        assert src.V[0, 0, 0] == pytest.approx(s)
        assert np.allclose(src.V[1], [[0, 0], [s, 0]])
        assert np.allclose(src.V[2], [[0, 1], [0, 0]])
        assert np.allclose(src.rho, np.diag([2 / 3, 1 / 3]))

    def test_completeness_by_hand(self):
        # V1'V1 + V2'V2 = diag(1/2 + 1/2, 0) and V3'V3 = diag(0, 1)
        src = example1_source()
        total = sum(v.conj().T @ v for v in src.V)
        assert np.max(np.abs(total - np.eye(2))) <= 1e-12

    def test_stationarity_by_hand(self):
        # V1 rho V1' = diag(1/3, 0), V2 rho V2' = diag(0, 1/3),
        # V3 rho V3' = diag(1/3, 0); the sum reproduces rho.
        src = example1_source()
        total = sum(v @ src.rho @ v.conj().T for v in src.V)
        assert np.max(np.abs(total - src.rho)) <= 1e-12

    def test_validation_passes(self):
        report = validate_source(example1_source())
        assert report.all_ok
        assert report.completeness_residual <= 1e-12
        assert report.stationarity_residual <= 1e-12

    def test_doubled_operators_fail_completeness(self):
        src = example1_source()
        broken = KrausSource(d=3, k=2, V=2.0 * src.V, rho=src.rho)
        report = validate_source(broken)
        assert not report.completeness_ok
        # sum of (2V)'(2V) is 4I, so the residual is |3 I| in max norm
        assert report.completeness_residual == pytest.approx(3.0)

    def test_wrong_memory_density_fails_stationarity(self):
        # with rho = I/2 the operators map it to diag(3/4, 1/4)
        src = example1_source()
        broken = KrausSource(d=3, k=2, V=src.V, rho=np.eye(2, dtype=complex) / 2)
        report = validate_source(broken)
        assert not report.stationarity_ok
        assert report.stationarity_residual == pytest.approx(0.25)

    def test_transfer_spectrum_gap(self):
        # memory transfer operator has moduli (1, 1/2, 0, 0)
        report = validate_source(example1_source())
        assert report.transfer_moduli[0] == pytest.approx(1.0)
        assert report.spectral_gap == pytest.approx(0.5)


class TestFcsDensity:
    def test_one_site_block_is_maximally_mixed(self):
        block = fcs_density(example1_source(), 1)
        assert np.max(np.abs(block.matrix - np.eye(3) / 3)) <= 1e-12

    def test_two_site_block_properties(self):
        block = fcs_density(example1_source(), 2)
        res = block.residuals()
        assert res["hermiticity"] <= 1e-12
        assert res["min_eigenvalue"] >= -1e-12
        assert res["trace_error"] <= 1e-12
        for side in ("first", "last"):
            marg = partial_trace(block.matrix, 3, side)
            assert np.max(np.abs(marg - np.eye(3) / 3)) <= 1e-12

    def test_two_site_diagonal_by_hand(self):
        # nonzero string weights at n=2: (1,1), (1,2), (3,1), (3,2) carry
        # 1/6 each and (2,3) carries 1/3; the other four strings vanish.
        block = fcs_density(example1_source(), 2).matrix
        diag = np.real(np.diag(block))
        expected = np.zeros(9)
        expected[[0, 1, 6, 7]] = 1 / 6  # strings 11, 12, 31, 32
        expected[5] = 1 / 3  # string 23
        assert np.max(np.abs(diag - expected)) <= 1e-12

    def test_scalar_memory_is_pure_product(self):
        # with one-dimensional memory the block is the pure product state
        # built from the amplitude vector of the scalar operators
        amps = np.sqrt([0.6, 0.4])
        src = KrausSource(d=2, k=1, V=amps.reshape(2, 1, 1).astype(complex), rho=np.eye(1, dtype=complex))
        vec = amps.astype(complex)
        for n in (1, 2, 3):
            block = fcs_density(src, n)
            psi = vec
            for _ in range(n - 1):
                psi = np.kron(psi, vec)
            assert np.max(np.abs(block.matrix - np.outer(psi, psi.conj()))) <= 1e-12

    def test_size_cap(self):
        with pytest.raises(SizeCapExceeded):
            fcs_density(example1_source(), 9, size_cap=4096)


class TestProductDensity:
    def test_identity(self):
        block = product_density(np.eye(2) / 2, 2)
        assert np.allclose(block.matrix, np.eye(4) / 4)

    def test_pure_product(self):
        block = product_density(np.diag([1.0, 0.0]), 3)
        expected = np.zeros((8, 8))
        expected[0, 0] = 1.0
        assert np.array_equal(block.matrix, expected)

    def test_hand_kronecker(self):
        block = product_density(np.diag([2 / 3, 1 / 3]), 2)
        assert np.allclose(block.matrix, np.diag([4 / 9, 2 / 9, 2 / 9, 1 / 9]))


class TestMarginalConsistency:
    def test_product_source(self):
        src = product_source(np.diag([0.6, 0.4]))
        for n in (1, 2, 3):
            report = marginal_consistency(src, n)
            assert report.drop_last_residual <= 1e-12
            assert report.drop_first_residual <= 1e-12

    @pytest.mark.parametrize("n", [1, 2])
    def test_example_source(self, n):
        report = marginal_consistency(correlated_source(example1_source()), n)
        assert report.drop_last_residual <= 1e-10
        assert report.drop_first_residual <= 1e-10


class TestRandomSource:
    def test_deterministic(self):
        a = random_source(3, 2, seed=42)
        b = random_source(3, 2, seed=42)
        assert np.array_equal(a.V, b.V)
        assert np.array_equal(a.rho, b.rho)

    def test_validation(self):
        for seed in range(5):
            src = random_source(3, 2, seed=seed)
            report = validate_source(src)
            assert report.completeness_residual <= 1e-8
            assert report.stationarity_residual <= 1e-8

    def test_scalar_memory_case(self):
        src = random_source(2, 1, seed=3)
        report = validate_source(src)
        assert report.all_ok
        # one-dimensional memory: block is a pure product state
        block = fcs_density(src, 2)
        eigvals = np.linalg.eigvalsh(block.matrix)
        assert eigvals[-1] == pytest.approx(1.0, abs=1e-10)

    def test_block_validity_property(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            d = int(rng.integers(2, 4))
            k = int(rng.integers(1, 4))
            src = random_source(d, k, seed=int(rng.integers(0, 10_000)))
            n = int(rng.integers(1, 5))
            res = fcs_density(src, n, size_cap=4096).residuals()
            assert res["hermiticity"] <= 1e-10
            assert res["min_eigenvalue"] >= -1e-10
            assert res["trace_error"] <= 1e-9

    def test_reducible_memory_detected(self, monkeypatch):
        # two invariant memory sectors give two stationary densities; the
        # probe restart must notice and refuse
        import qsource.sources as sources_mod
        from qsource.sources import FixedPointNotUnique

        blocks = np.vstack(
            [
                np.diag([np.sqrt(0.3), np.sqrt(0.8)]),
                np.diag([np.sqrt(0.7), np.sqrt(0.2)]),
            ]
        ).astype(complex)
        monkeypatch.setattr(
            sources_mod, "haar_isometry", lambda rows, cols, rng: blocks
        )
        with pytest.raises(FixedPointNotUnique):
            random_source(2, 2, seed=0)


class TestSerialization:
    def test_kraus_round_trip_bit_exact(self):
        src = random_source(3, 2, seed=9)
        loaded = source_from_json(source_to_json(src)).payload
        assert np.array_equal(loaded.V, src.V)
        assert np.array_equal(loaded.rho, src.rho)
        assert loaded.d == src.d and loaded.k == src.k

    def test_product_round_trip_bit_exact(self):
        src = product_source(np.diag([2 / 3, 1 / 3]))
        loaded = source_from_json(source_to_json(src))
        assert loaded.kind == "product"
        assert np.array_equal(loaded.payload, src.payload)

    def test_fingerprint_stable_and_distinct(self):
        a = correlated_source(example1_source())
        b = maximally_mixed_source(3)
        assert source_fingerprint(a) == source_fingerprint(a)
        assert source_fingerprint(a) != source_fingerprint(b)


def test_entropy_additive_on_products():
    from qsource.entropy import von_neumann_entropy

    rho1 = np.diag([0.5, 0.3, 0.2])
    single = von_neumann_entropy(rho1)
    for n in (2, 3):
        block = product_density(rho1, n)
        assert von_neumann_entropy(block) == pytest.approx(n * single, abs=1e-8)


def test_density_matrix_shape_check():
    from qsource.linalg import DimensionMismatch

    with pytest.raises(DimensionMismatch):
        DensityMatrix(site_dim=2, n_sites=2, matrix=np.eye(3))
