import numpy as np
import pytest

import oracles
from scefis import features as ft
from scefis.keypoints import SeedPoint


class TestStats8:
    def test_constant_matrix(self):
        out = ft.stats8(np.full((3, 3), 4.0))
        np.testing.assert_allclose(out, [4, 4, 0, 0, 4, 0, 4, 4])

    def test_small_matrix_hand_oracle(self):
        m = np.array([[1.0, 2.0], [3.0, 4.0]])
        out = ft.stats8(m)
        expected = oracles.stats8_bruteforce(m)
        # implementation order: mean, median, std, cov, mode, range, min, max
        np.testing.assert_allclose(out, expected, atol=1e-12)
        assert out[0] == 2.5 and out[1] == 2.5
        assert out[5] == 3 and out[6] == 1 and out[7] == 4

    def test_row_permutation_invariance(self):
        rng = np.random.default_rng(0)
        m = rng.uniform(0, 9, (6, 4))
        p = m[rng.permutation(6)]
        a, b = ft.stats8(m), ft.stats8(p)
        for i in (0, 1, 4, 5, 6, 7):  # mean/median/mode/range/min/max
            assert a[i] == pytest.approx(b[i])

    def test_random_matches_oracle(self):
        rng = np.random.default_rng(3)
        m = rng.normal(0, 2, (7, 5))
        np.testing.assert_allclose(
            ft.stats8(m), oracles.stats8_bruteforce(m), atol=1e-10
        )


class TestDescriptorFeatures:
    def test_all_zero(self):
        out = ft.descriptor_features(np.zeros(128))
        assert out[7] == 128  # zero population
        assert out[5] == 0  # min-after-zero flagged 0

    def test_single_nonzero(self):
        d = np.zeros(128)
        d[-1] = 5.0
        out = ft.descriptor_features(d)
        assert out[7] == 127
        assert out[5] == 5.0
        assert out[6] == 5.0

    def test_random_matches_oracle(self):
        rng = np.random.default_rng(8)
        d = rng.uniform(0, 1, 128)
        d[rng.integers(0, 128, 20)] = 0.0
        out = ft.descriptor_features(d)
        st = oracles.stats8_bruteforce(d.reshape(16, 8))
        assert out[0] == pytest.approx(st[0])
        assert out[1] == pytest.approx(st[1])
        assert out[2] == pytest.approx(st[2])
        assert out[3] == pytest.approx(st[3])
        assert out[4] == pytest.approx(st[7] - st[6])
        assert out[5] == pytest.approx(min(v for v in d if v > 0))
        assert out[6] == pytest.approx(max(d))
        assert out[7] == sum(1 for v in d if v == 0)


class TestTransformStack:
    def test_constant_patch(self):
        patch = np.full((4, 4), 3.0)
        d_c, a_c, g_m = ft.transform_stack(patch)
        assert d_c[0, 0] == pytest.approx(12.0)  # orthonormal DC: c * n
        assert np.count_nonzero(np.abs(d_c) > 1e-12) == 1
        np.testing.assert_allclose(a_c, np.full((2, 2), 6.0))
        np.testing.assert_allclose(g_m, 0.0)

    def test_haar_2x2_hand_value(self):
        _, a_c, _ = ft.transform_stack(np.array([[1.0, 2.0], [3.0, 4.0]]))
        np.testing.assert_allclose(a_c, [[5.0]])

    def test_dct_matches_cosine_sum_oracle(self):
        rng = np.random.default_rng(12)
        patch = rng.uniform(0, 255, (8, 8))
        d_c, _, _ = ft.transform_stack(patch)
        np.testing.assert_allclose(d_c, oracles.dct2_bruteforce(patch), atol=1e-9)

    def test_odd_size_haar(self):
        patch = np.arange(9.0).reshape(3, 3)
        _, a_c, _ = ft.transform_stack(patch)
        assert a_c.shape == (2, 2)


class TestGLCM:
    def test_constant_matrix(self):
        out = ft.glcm_features(np.full((4, 4), 2.0), directions=(0,))
        contrast, correlation, energy, homogeneity = out
        assert contrast == 0 and correlation == 0
        assert energy == 1 and homogeneity == 1

    def test_checkerboard_hand_count(self):
        m = np.array([[0.0, 1.0], [1.0, 0.0]])
        p = ft.glcm(m, 0)
        # horizontal pairs: (0,7) and (7,0) once each, symmetric -> 4 counts
        expected = oracles.glcm_bruteforce(m, 0)
        np.testing.assert_allclose(p, expected)
        contrast = ft.glcm_properties(p)[0]
        assert contrast == pytest.approx(49.0)  # all mass at |i-j| = 7

    def test_transpose_symmetry(self):
        rng = np.random.default_rng(5)
        m = rng.uniform(0, 10, (6, 6))
        np.testing.assert_allclose(ft.glcm(m, 90), ft.glcm(m.T, 0))

    def test_all_directions_match_oracle(self):
        rng = np.random.default_rng(6)
        m = rng.uniform(0, 50, (7, 5))
        for d in (0, 45, 90, 135):
            np.testing.assert_allclose(ft.glcm(m, d), oracles.glcm_bruteforce(m, d))


def _seed_with_descriptor(x, y, rng):
    return SeedPoint(x=x, y=y, response=1.0, descriptor=rng.uniform(0, 1, 128))


class TestF1F2:
    def test_column_count_108(self):
        rng = np.random.default_rng(1)
        img = rng.integers(0, 256, (60, 60)).astype(np.uint8)
        seeds = [_seed_with_descriptor(30, 30, rng)]
        f1 = ft.build_F1(img, seeds, 11)
        assert f1.shape == (1, 108)
        assert len(ft.feature_schema()) == 108

    def test_row_equals_component_oracles(self):
        rng = np.random.default_rng(2)
        img = rng.integers(0, 256, (60, 60)).astype(np.uint8)
        seed = _seed_with_descriptor(25, 20, rng)
        f1 = ft.build_F1(img, [seed], 11)[0]
        patch = img[15:26, 20:31].astype(float)
        d_c, a_c, g_m = ft.transform_stack(patch)
        np.testing.assert_allclose(f1[0:8], oracles.stats8_bruteforce(patch), atol=1e-9)
        np.testing.assert_allclose(f1[8:16], oracles.stats8_bruteforce(d_c), atol=1e-9)
        np.testing.assert_allclose(f1[16:24], oracles.stats8_bruteforce(a_c), atol=1e-9)
        np.testing.assert_allclose(f1[24:32], oracles.stats8_bruteforce(g_m), atol=1e-9)
        np.testing.assert_allclose(f1[32:40], ft.descriptor_features(seed.descriptor))
        np.testing.assert_allclose(
            f1[40:44],
            ft.glcm_properties(oracles.glcm_bruteforce(patch, 0)),
            atol=1e-9,
        )
        np.testing.assert_allclose(
            f1[104:108],
            ft.glcm_properties(
                oracles.glcm_bruteforce(seed.descriptor.reshape(16, 8), 0)
            ),
            atol=1e-9,
        )

    def test_determinism(self):
        rng = np.random.default_rng(3)
        img = rng.integers(0, 256, (40, 40)).astype(np.uint8)
        seeds = [_seed_with_descriptor(20, 20, np.random.default_rng(7))]
        a = ft.build_F1(img, seeds, 9)
        b = ft.build_F1(img, seeds, 9)
        np.testing.assert_array_equal(a, b)

    def test_f2_identical_rows(self):
        row = np.arange(108.0)
        f1 = np.vstack([row, row, row])
        f2 = ft.build_F2(f1)
        assert f2.shape == (8, 108)
        np.testing.assert_allclose(f2[0], row)  # mean row
        np.testing.assert_allclose(f2[3], 0.0)  # std row

    def test_f2_matches_per_column_oracle(self):
        rng = np.random.default_rng(4)
        f1 = rng.normal(0, 1, (5, 108))
        f2 = ft.build_F2(f1)
        for c in (0, 17, 107):
            col = f1[:, c].reshape(-1, 1)
            st = oracles.stats8_bruteforce(col)
            assert f2[0, c] == pytest.approx(st[0])  # mean
            assert f2[1, c] == pytest.approx(st[1])  # median
            assert f2[2, c] == pytest.approx(st[4])  # mode
            assert f2[3, c] == pytest.approx(st[2])  # std
            assert f2[4, c] == pytest.approx(st[2] ** 2)  # variance
            assert f2[5, c] == pytest.approx(st[5])
            assert f2[6, c] == pytest.approx(st[6])
            assert f2[7, c] == pytest.approx(st[7])

    def test_single_row_f1_flagged_zeros(self):
        f2 = ft.build_F2(np.random.default_rng(0).normal(0, 1, (1, 108)))
        np.testing.assert_allclose(f2[3], 0.0)
        np.testing.assert_allclose(f2[4], 0.0)

    def test_no_nan_escapes(self):
        rng = np.random.default_rng(10)
        img = rng.integers(0, 256, (50, 50)).astype(np.uint8)
        seeds = [_seed_with_descriptor(5, 5, rng), _seed_with_descriptor(45, 40, rng)]
        f1 = ft.build_F1(img, seeds, 15)
        assert np.all(np.isfinite(f1))
        assert np.all(np.isfinite(ft.build_F2(f1)))
