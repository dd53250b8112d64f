import time
import pytest
import numpy as np

from gbm3d.core import DenoiseParams, InvalidInputError
from gbm3d.matching import DistanceMap, FFT_METHOD, NAIVE_METHOD, block_norms, candidate_bounds, distance_map, \
    naive_distance_map, top_k, gather_blocks, build_match_table


def random_image(size, seed=0):
    return np.random.default_rng(seed).uniform(0, 255, size=(size, size))


class TestBlockNorms:
    """
    Test suite for the block norm image.
    """

    def test_constant(self):
        norms = block_norms(np.full((8, 8), 2.0), 2)
        assert np.allclose(norms, 16.0)

    @pytest.mark.oracle
    def test_matches_direct_sums(self):
        img = random_image(32, seed=1)
        norms = block_norms(img, 8)
        for row, col in [(0, 0), (5, 17), (24, 24)]:
            assert norms[row, col] == pytest.approx(np.sum(img[row:row + 8, col:col + 8] ** 2), rel=1e-10)

    def test_too_large(self):
        with pytest.raises(InvalidInputError):
            block_norms(np.zeros((8, 16)), 9)


class TestDistanceMap:
    """
    Test suite for the candidate window and the correlation distances.
    """

    def test_window_bounds(self):
        assert candidate_bounds((64, 64), (16, 16), 16, 32) == (0, 31, 0, 31)
        assert candidate_bounds((64, 64), (32, 32), 16, 32) == (16, 47, 16, 47)
        assert candidate_bounds((64, 64), (40, 48), 16, 32) == (24, 48, 32, 48)
        assert candidate_bounds((128, 128), (48, 64), 16, 32) == (32, 63, 48, 79)
        assert candidate_bounds((16, 16), (0, 0), 16, 32) == (0, 0, 0, 0)
        assert candidate_bounds((64, 32), (16, 0), 8, 32, global_search=True) == (0, 56, 0, 24)

    def test_reference_outside(self):
        with pytest.raises(InvalidInputError):
            candidate_bounds((64, 64), (56, 0), 16, 32)

    def test_reference_distance_is_zero(self):
        img = random_image(64, seed=2)
        dmap = distance_map(img, block_norms(img, 16), (16, 32), 16, 32)
        assert dmap.distances[16 - dmap.origin[0], 32 - dmap.origin[1]] == 0
        assert np.all(dmap.distances >= 0)

    def test_repeated_texture(self):
        """
        Tests that a texture repeating every 8 rows is matched at distance zero 8 rows down.
        """
        texture = random_image(64, seed=3)[:8]
        img = np.tile(texture, (8, 1))
        dmap = distance_map(img, block_norms(img, 16), (16, 16), 16, 32)
        assert dmap.distances[24 - dmap.origin[0], 16 - dmap.origin[1]] == pytest.approx(0, abs=1e-6)

    @pytest.mark.oracle
    @pytest.mark.parametrize("ref_pos", [(0, 0), (16, 32), (48, 48), (23, 7)])
    def test_matches_brute_force(self, ref_pos):
        img = random_image(64, seed=4)
        fast = distance_map(img, block_norms(img, 16), ref_pos, 16, 32)
        naive = naive_distance_map(img, ref_pos, 16, 32)
        assert fast.origin == naive.origin
        assert np.allclose(fast.distances, naive.distances, rtol=0, atol=1e-6)

    @pytest.mark.oracle
    def test_expanded_square_distance(self):
        """
        Tests ||f - g||^2 = ||f||^2 + ||g||^2 - 2<f, g> on random block pairs, with the norms and the inner
        product taken from the correlations.
        """
        rng = np.random.default_rng(11)
        images = [random_image(64, seed=seed) for seed in range(4)]
        norms = {(index, n): block_norms(img, n) for index, img in enumerate(images) for n in (8, 16)}
        for _ in range(1000):
            index = int(rng.integers(len(images)))
            n = int(rng.choice([8, 16]))
            img = images[index]
            ref_row, ref_col, row, col = (int(value) for value in rng.integers(0, 64 - n + 1, size=4))
            if (ref_row, ref_col) == (row, col):
                continue
            dmap = distance_map(img, norms[index, n], (ref_row, ref_col), n, 64, global_search=True)
            direct = np.sum((img[ref_row:ref_row + n, ref_col:ref_col + n] - img[row:row + n, col:col + n]) ** 2)
            assert dmap.distances[row, col] == pytest.approx(direct, rel=1e-9)

    @pytest.mark.oracle
    def test_global_search(self):
        img = random_image(32, seed=5)
        fast = distance_map(img, block_norms(img, 8), (8, 8), 8, 8, global_search=True)
        naive = naive_distance_map(img, (8, 8), 8, 8, global_search=True)
        assert fast.distances.shape == (25, 25)
        assert np.allclose(fast.distances, naive.distances, rtol=0, atol=1e-6)


class TestTopK:
    """
    Test suite for the selection of the closest candidates.
    """

    @staticmethod
    def sorted_oracle(dmap, reference, k):
        """
        The exhaustive sort: every candidate with its distance and raster index, reference first.
        """
        rows, cols = dmap.distances.shape
        candidates = [(dmap.distances[i, j], i * cols + j, (dmap.origin[0] + i, dmap.origin[1] + j))
                      for i in range(rows) for j in range(cols)
                      if (dmap.origin[0] + i, dmap.origin[1] + j) != tuple(reference)]
        candidates.sort()
        return [tuple(reference)] + [position for _, _, position in candidates[:k - 1]]

    def test_k_one(self):
        dmap = DistanceMap((0, 0), np.array([[0.0, 0.0], [1.0, 2.0]]))
        matches = top_k(dmap, (1, 1), 1)
        assert matches.count == 1
        assert matches.positions.tolist() == [[1, 1]]

    def test_raster_tie_break(self):
        dmap = DistanceMap((4, 4), np.zeros((3, 3)))
        matches = top_k(dmap, (4, 4), 4)
        assert matches.positions.tolist() == [[4, 4], [4, 5], [4, 6], [5, 4]]
        assert np.all(matches.distances == 0)

    def test_reference_first(self):
        dmap = DistanceMap((0, 0), np.array([[0.0, 0.0, 5.0]]))
        matches = top_k(dmap, (0, 1), 3)
        assert matches.positions.tolist() == [[0, 1], [0, 0], [0, 2]]
        assert matches.distances.tolist() == [0.0, 0.0, 5.0]

    def test_pad_fill(self):
        dmap = DistanceMap((0, 0), np.array([[0.0, 3.0]]))
        matches = top_k(dmap, (0, 0), 4)
        assert matches.count == 2
        assert matches.positions.tolist() == [[0, 0], [0, 1], [0, 0], [0, 0]]
        assert matches.distances.tolist() == [0.0, 3.0, 0.0, 0.0]

    def test_tau_match(self):
        dmap = DistanceMap((0, 0), np.array([[0.0, 1.0, 2.0, 9.0]]))
        assert top_k(dmap, (0, 0), 4, tau_match=5).count == 3
        assert top_k(dmap, (0, 0), 4, tau_match=0.5).count == 1
        assert top_k(dmap, (0, 0), 4, tau_match=0.5, min_matches=3).count == 3

    @pytest.mark.oracle
    @pytest.mark.parametrize("seed", range(4))
    def test_matches_sort_oracle(self, seed):
        rng = np.random.default_rng(seed)
        dmap = DistanceMap((3, 5), rng.integers(0, 6, size=(7, 9)).astype(float))
        reference = (6, 9)
        matches = top_k(dmap, reference, 16)
        assert [tuple(position) for position in matches.positions] == \
            TestTopK.sorted_oracle(dmap, reference, 16)
        assert np.all(np.diff(matches.distances[1:]) >= 0)

    def test_invalid(self):
        dmap = DistanceMap((0, 0), np.zeros((2, 2)))
        with pytest.raises(InvalidInputError):
            top_k(dmap, (0, 0), 0)
        with pytest.raises(InvalidInputError):
            top_k(dmap, (5, 5), 2)


class TestMatchTable:
    """
    Test suite for the match table of a full tiling.
    """

    PARAMS = DenoiseParams()

    def test_single_tile(self):
        table = build_match_table(np.full((16, 16), 7.0), TestMatchTable.PARAMS, 16)
        assert len(table) == 1
        assert table.counts[0, 0] == 1
        assert np.all(table.positions[0, 0] == 0)
        assert table.valid_mask()[0, 0].tolist() == [True] + [False] * 15

    def test_constant_image(self):
        table = build_match_table(np.full((64, 64), 7.0), TestMatchTable.PARAMS, 16)
        matches = table[0, 0]
        assert matches.count == 16
        assert np.all(matches.distances == 0)
        assert matches.positions.tolist() == [[0, col] for col in range(16)]

    def test_identical_halves(self):
        half = random_image(32, seed=6)[:, :16]
        img = np.hstack([half, half])
        table = build_match_table(img, TestMatchTable.PARAMS.replace(window=48), 16)
        matches = table[0, 0]
        assert matches.positions[1].tolist() == [0, 16]
        assert matches.distances[1] == pytest.approx(0, abs=1e-6)

    @pytest.mark.oracle
    def test_matches_naive_table(self):
        img = random_image(64, seed=7)
        fast = build_match_table(img, TestMatchTable.PARAMS, 16, FFT_METHOD)
        naive = build_match_table(img, TestMatchTable.PARAMS, 16, NAIVE_METHOD)
        assert np.array_equal(fast.positions, naive.positions)
        assert np.allclose(fast.distances, naive.distances, rtol=0, atol=1e-6)

    @pytest.mark.oracle
    @pytest.mark.parametrize("seed", range(50))
    def test_random_images_match_naive_table(self, seed):
        """
        Tests the correlation tables against the naive ones on sizes 32 to 128 and both block sizes.
        """
        size = 32 + 16 * (seed % 7)
        n = 8 if seed % 2 else 16
        img = random_image(size, seed=100 + seed)
        fast = build_match_table(img, TestMatchTable.PARAMS, n, FFT_METHOD)
        naive = build_match_table(img, TestMatchTable.PARAMS, n, NAIVE_METHOD)
        assert np.array_equal(fast.positions, naive.positions)
        assert np.array_equal(fast.counts, naive.counts)
        assert np.allclose(fast.distances, naive.distances, rtol=0, atol=1e-6)

    def test_gathered_blocks(self):
        img = random_image(32, seed=8)
        table = build_match_table(img, TestMatchTable.PARAMS.replace(k=8), 8)
        blocks = gather_blocks(img, table.positions, 8)
        assert blocks.shape == (4, 4, 8, 8, 8)
        row, col = table.positions[2, 1, 3]
        assert np.array_equal(blocks[2, 1, 3], img[row:row + 8, col:col + 8])

    @pytest.mark.determinism
    @pytest.mark.parametrize("workers", [2, 4])
    def test_independent_of_workers(self, workers):
        img = random_image(64, seed=9)
        serial = build_match_table(img, TestMatchTable.PARAMS, 16)
        parallel = build_match_table(img, TestMatchTable.PARAMS, 16, workers=workers)
        assert np.array_equal(serial.positions, parallel.positions)
        assert np.array_equal(serial.distances, parallel.distances)
        assert np.array_equal(serial.counts, parallel.counts)

    def test_invalid(self):
        with pytest.raises(InvalidInputError):
            build_match_table(np.zeros((20, 16)), TestMatchTable.PARAMS, 16)
        with pytest.raises(InvalidInputError):
            build_match_table(np.zeros((16, 16)), TestMatchTable.PARAMS, 16, method="sorted")

    @pytest.mark.slow
    def test_fft_faster_than_naive(self):
        img = random_image(1024, seed=10)
        start = time.perf_counter()
        build_match_table(img, TestMatchTable.PARAMS, 16, FFT_METHOD)
        fft_seconds = time.perf_counter() - start
        start = time.perf_counter()
        build_match_table(img, TestMatchTable.PARAMS, 16, NAIVE_METHOD)
        naive_seconds = time.perf_counter() - start
        assert naive_seconds >= 2 * fft_seconds
