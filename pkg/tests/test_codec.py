"""Scan orders, predictors, distances, and the compress/decompress cycle."""

from fractions import Fraction

import numpy as np
import pytest

from conftest import const_block, grid_as_tuples, grid_from_labels, random_grid
from oracles import ref_compress, ref_mae, ref_max, ref_scan
from pxprune import (
    CodecConfig,
    CompressedImage,
    ConfigMismatch,
    MalformedStream,
    Metric,
    NoNeighborAvailable,
    PredictionContext,
    Predictor,
    RetainMask,
    ShapeMismatch,
    block_distance,
    compress,
    decompress,
    encoder_state,
    predict,
    retained_positions,
    scan_order,
)

PREDICTORS = [Predictor.RASTER, Predictor.SERPENTINE, Predictor.PRED2D]


class TestScanOrder:
    def test_raster_2x2(self):
        assert scan_order(Predictor.RASTER, 2, 2) == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_serpentine_2x3(self):
        assert scan_order(Predictor.SERPENTINE, 2, 3) == [
            (0, 0), (0, 1), (0, 2), (1, 2), (1, 1), (1, 0),
        ]

    def test_single_block(self):
        for p in PREDICTORS:
            assert scan_order(p, 1, 1) == [(0, 0)]

    def test_pred2d_is_raster_order(self):
        assert scan_order(Predictor.PRED2D, 3, 4) == scan_order(Predictor.RASTER, 3, 4)

    def test_bijective_and_anchored(self, rng):
        for _ in range(25):
            rows, cols = int(rng.integers(1, 9)), int(rng.integers(1, 9))
            for p in PREDICTORS:
                order = scan_order(p, rows, cols)
                assert order[0] == (0, 0)
                assert sorted(order) == [(r, c) for r in range(rows) for c in range(cols)]
                assert order == ref_scan(p.name.lower(), rows, cols)


class TestPredict:
    def test_neighbor_agreement_selects_left(self):
        x, y = const_block(1), const_block(2)
        ctx = PredictionContext(left=x, upper=y, upper_left=y)
        assert np.array_equal(predict(Predictor.PRED2D, ctx), x)

    def test_neighbor_agreement_selects_upper(self):
        x, y = const_block(1), const_block(2)
        ctx = PredictionContext(left=x, upper=y, upper_left=x)
        assert np.array_equal(predict(Predictor.PRED2D, ctx), y)

    def test_all_agree_defaults_left(self):
        x = const_block(9)
        ctx = PredictionContext(left=x, upper=x, upper_left=x)
        assert np.array_equal(predict(Predictor.PRED2D, ctx), x)

    def test_all_distinct_defaults_left(self):
        a, b, c = const_block(1), const_block(2), const_block(3)
        ctx = PredictionContext(left=a, upper=b, upper_left=c)
        assert np.array_equal(predict(Predictor.PRED2D, ctx), a)

    def test_boundary_fallbacks(self):
        a, b = const_block(4), const_block(5)
        assert np.array_equal(predict(Predictor.PRED2D, PredictionContext(left=a)), a)
        assert np.array_equal(predict(Predictor.PRED2D, PredictionContext(upper=b)), b)

    def test_1d_uses_predecessor(self):
        p = const_block(7)
        for kind in (Predictor.RASTER, Predictor.SERPENTINE):
            assert np.array_equal(predict(kind, PredictionContext(predecessor=p)), p)

    def test_empty_context_raises(self):
        with pytest.raises(NoNeighborAvailable):
            predict(Predictor.PRED2D, PredictionContext())
        with pytest.raises(NoNeighborAvailable):
            predict(Predictor.RASTER, PredictionContext(left=const_block(1)))


class TestBlockDistance:
    def test_identical_blocks(self):
        b = const_block(123, block_size=4, channels=3)
        assert block_distance(b, b, Metric.MAE) == 0.0
        assert block_distance(b, b, Metric.MAX) == 0.0

    def test_single_sample_saturated(self):
        a = np.zeros((32, 32, 1), dtype=np.uint8)
        b = a.copy()
        b[3, 5, 0] = 255
        assert block_distance(a, b, Metric.MAX) == 1.0
        assert block_distance(a, b, Metric.MAE) == pytest.approx(1 / 1024, abs=0)
        assert ref_mae(a.ravel().tolist(), b.ravel().tolist()) == Fraction(1, 1024)

    def test_uniform_offset_51(self):
        a = const_block(10, block_size=8, channels=3)
        b = const_block(61, block_size=8, channels=3)
        assert block_distance(a, b, Metric.MAX) == pytest.approx(0.2, abs=0)
        assert block_distance(a, b, Metric.MAE) == pytest.approx(0.2, abs=0)

    def test_symmetry_and_oracle_agreement(self, rng):
        for _ in range(50):
            shape = (int(rng.integers(1, 9)),) * 2 + (int(rng.choice([1, 3])),)
            a = rng.integers(0, 256, size=shape, dtype=np.uint8)
            b = rng.integers(0, 256, size=shape, dtype=np.uint8)
            fa, fb = a.ravel().tolist(), b.ravel().tolist()
            for metric, ref in ((Metric.MAE, ref_mae), (Metric.MAX, ref_max)):
                d_ab = block_distance(a, b, metric)
                assert d_ab == block_distance(b, a, metric)
                assert d_ab == pytest.approx(float(ref(fa, fb)), rel=1e-12)

    def test_zero_iff_equal(self, rng):
        a = rng.integers(0, 256, size=(4, 4, 3), dtype=np.uint8)
        b = a.copy()
        b[0, 0, 0] ^= 1
        assert block_distance(a, b, Metric.MAX) > 0
        assert block_distance(a, b, Metric.MAE) > 0

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            block_distance(const_block(0, 2), const_block(0, 4), Metric.MAX)


def _kept_set(mask: RetainMask):
    return {tuple(pos) for pos in np.argwhere(mask.kept)}


class TestCompress:
    def test_uniform_grid_keeps_anchor_only(self):
        grid = grid_from_labels([[5, 5], [5, 5]])
        for p in PREDICTORS:
            comp, mask = compress(grid, CodecConfig(predictor=p, block_size=2))
            assert _kept_set(mask) == {(0, 0)}
            assert mask.retain_ratio == 0.25
            assert comp.entries[0][:2] == (0, 0)

    def test_row_constant_grid(self):
        grid = grid_from_labels([[r] * 4 for r in range(3)])
        for p, expected in [
            (Predictor.RASTER, {(0, 0), (1, 0), (2, 0)}),
            (Predictor.PRED2D, {(0, 0), (1, 0), (2, 0)}),
            # serpentine reaches row 1 at its right edge, so the row change
            # is caught there instead of at column 0
            (Predictor.SERPENTINE, {(0, 0), (1, 3), (2, 0)}),
        ]:
            _, mask = compress(grid, CodecConfig(predictor=p, block_size=2))
            assert _kept_set(mask) == expected

    def test_column_constant_grid_separates_1d_from_2d(self):
        grid = grid_from_labels([[c for c in range(4)] for _ in range(3)])
        _, raster = compress(grid, CodecConfig(predictor=Predictor.RASTER, block_size=2))
        assert raster.retained_count == 12
        _, pred2d = compress(grid, CodecConfig(predictor=Predictor.PRED2D, block_size=2))
        assert _kept_set(pred2d) == {(0, c) for c in range(4)}
        _, serp = compress(grid, CodecConfig(predictor=Predictor.SERPENTINE, block_size=2))
        assert serp.retained_count == 10

    def test_matches_reference_simulator_exact(self, rng):
        for _ in range(30):
            rows, cols = int(rng.integers(1, 7)), int(rng.integers(1, 7))
            style = str(rng.choice(["uniform", "striped", "mixed", "noise"]))
            grid = random_grid(rng, rows, cols, 2, int(rng.choice([1, 3])), style)
            tuples = grid_as_tuples(grid)
            for p in PREDICTORS:
                _, mask = compress(grid, CodecConfig(predictor=p, block_size=2))
                ref_kept, _ = ref_compress(tuples, rows, cols, p.name.lower())
                assert _kept_set(mask) == ref_kept

    def test_matches_reference_simulator_thresholded(self, rng):
        from conftest import near_uniform_grid

        for tau in (0.005, 0.02, 0.1):
            for metric in (Metric.MAE, Metric.MAX):
                cfg = CodecConfig(
                    predictor=Predictor.PRED2D, metric=metric, tau=tau, block_size=2
                )
                for _ in range(8):
                    rows, cols = int(rng.integers(2, 6)), int(rng.integers(2, 6))
                    grid = near_uniform_grid(rng, rows, cols, 2, 1, spread=12)
                    tuples = grid_as_tuples(grid)
                    _, mask = compress(grid, cfg)
                    ref_kept, _ = ref_compress(
                        tuples, rows, cols, "pred2d", metric.name.lower(), cfg.tau_fixed
                    )
                    assert _kept_set(mask) == ref_kept

    def test_entries_in_scan_order_with_original_coords(self, rng):
        grid = random_grid(rng, 5, 4, 2, 1, "noise")
        for p in PREDICTORS:
            cfg = CodecConfig(predictor=p, block_size=2)
            comp, mask = compress(grid, cfg)
            coords = [(r, c) for r, c, _ in comp.entries]
            assert coords == retained_positions(mask, p)
            order_index = {pos: i for i, pos in enumerate(scan_order(p, 5, 4))}
            assert all(
                order_index[coords[i]] < order_index[coords[i + 1]]
                for i in range(len(coords) - 1)
            )

    def test_determinism(self, rng):
        grid = random_grid(rng, 4, 4, 2, 3, "mixed")
        cfg = CodecConfig(tau=0.02, block_size=2)
        a, mask_a = compress(grid, cfg)
        b, mask_b = compress(grid, cfg)
        assert np.array_equal(mask_a.kept, mask_b.kept)
        assert all(
            ea[:2] == eb[:2] and np.array_equal(ea[2], eb[2])
            for ea, eb in zip(a.entries, b.entries)
        )

    def test_block_size_mismatch_rejected(self):
        grid = grid_from_labels([[0, 1]], block_size=4)
        with pytest.raises(ValueError):
            compress(grid, CodecConfig(block_size=2))


class TestAcceptanceMonotonicity:
    def test_larger_tau_accepts_superset_at_each_position(self, rng):
        # The per-position form of threshold monotonicity: a pair accepted at
        # a smaller tau is accepted at every larger tau. (Global retain-count
        # monotonicity does not follow, because omission alters the state.)
        from pxprune.codec import _accepts

        taus = [0.0, 0.005, 0.02, 0.05, 0.1, 0.5, 1.0]
        for _ in range(40):
            a = rng.integers(0, 256, size=(3, 3, 1), dtype=np.uint8)
            b = rng.integers(0, 256, size=(3, 3, 1), dtype=np.uint8)
            for metric in (Metric.MAE, Metric.MAX):
                accepted = [
                    _accepts(a, b, CodecConfig(metric=metric, tau=t, block_size=3))
                    for t in taus
                ]
                assert accepted == sorted(accepted)  # False... then True...


class TestDecompress:
    def test_roundtrip_exact(self, rng):
        for _ in range(10):
            grid = random_grid(rng, int(rng.integers(1, 6)), int(rng.integers(1, 6)), 3, 1, "mixed")
            for p in PREDICTORS:
                comp, _ = compress(grid, CodecConfig(predictor=p, block_size=3))
                out = decompress(comp)
                assert np.array_equal(out.blocks, grid.blocks)

    def test_anchor_only_stream_replicates(self):
        x = const_block(42)
        comp = CompressedImage(
            config=CodecConfig(predictor=Predictor.RASTER, block_size=2),
            rows=2, cols=2, block_size=2, channels=1, width=4, height=4,
            entries=((0, 0, x),),
        )
        out = decompress(comp)
        for r in range(2):
            for c in range(2):
                assert np.array_equal(out.blocks[r, c], x)

    def test_bounded_error_at_tau(self, rng):
        tau = 0.1
        cfg = CodecConfig(predictor=Predictor.PRED2D, metric=Metric.MAX, tau=tau, block_size=2)
        from conftest import near_uniform_grid

        grid = near_uniform_grid(rng, 4, 4, 2, 1, spread=20)
        comp, _ = compress(grid, cfg)
        out = decompress(comp)
        diff = np.abs(
            grid.blocks.astype(np.int16) - out.blocks.astype(np.int16)
        )
        assert int(diff.max()) <= 25  # floor(0.1 * 255)

    def test_encoder_state_equals_decoder_output(self, rng):
        from conftest import near_uniform_grid

        for metric in (Metric.MAE, Metric.MAX):
            cfg = CodecConfig(metric=metric, tau=0.05, block_size=2)
            grid = near_uniform_grid(rng, 5, 5, 2, 3, spread=15)
            comp, _ = compress(grid, cfg)
            state = encoder_state(grid, cfg)
            assert np.array_equal(state.blocks, decompress(comp).blocks)

    def test_state_transparency_at_tau_zero(self, rng):
        grid = random_grid(rng, 4, 5, 2, 1, "striped")
        state = encoder_state(grid, CodecConfig(block_size=2))
        assert np.array_equal(state.blocks, grid.blocks)


class TestComputeRetainMask:
    def test_uniform_image_keeps_anchor_only(self):
        from conftest import image_from_array
        from pxprune import compute_retain_mask

        img = image_from_array(np.full((64, 64, 1), 9, dtype=np.uint8))
        mask = compute_retain_mask(img, CodecConfig(block_size=32))
        assert _kept_set(mask) == {(0, 0)}

    def test_column_constant_image_keeps_first_row(self):
        from conftest import image_from_array
        from pxprune import compute_retain_mask

        # 96x128: 3x4 grid of 32px blocks, one constant per block column
        cols = [np.full((96, 32, 1), 40 * i, dtype=np.uint8) for i in range(4)]
        img = image_from_array(np.concatenate(cols, axis=1))
        mask = compute_retain_mask(img, CodecConfig(predictor=Predictor.PRED2D, block_size=32))
        assert _kept_set(mask) == {(0, c) for c in range(4)}

    def test_mask_idempotent_under_recompression(self, rng):
        from conftest import image_from_array
        from pxprune import assemble, compute_retain_mask
        from pxprune.grid import partition

        arr = rng.integers(0, 3, size=(16, 24, 1), dtype=np.uint8) * 90
        img = image_from_array(arr)
        cfg = CodecConfig(block_size=4)
        mask = compute_retain_mask(img, cfg)
        comp, _ = compress(partition(img, 4), cfg)
        reconstructed = assemble(decompress(comp))
        again = compute_retain_mask(reconstructed, cfg)
        assert np.array_equal(mask.kept, again.kept)


class TestMalformedStreams:
    def _comp(self, entries, predictor=Predictor.RASTER):
        return CompressedImage(
            config=CodecConfig(predictor=predictor, block_size=2),
            rows=2, cols=2, block_size=2, channels=1, width=4, height=4,
            entries=entries,
        )

    def test_missing_anchor(self):
        with pytest.raises(MalformedStream):
            decompress(self._comp(((0, 1, const_block(1)),)))
        with pytest.raises(MalformedStream):
            decompress(self._comp(()))

    def test_out_of_order_entries(self):
        entries = ((0, 0, const_block(1)), (1, 1, const_block(2)), (0, 1, const_block(3)))
        with pytest.raises(MalformedStream):
            decompress(self._comp(entries))

    def test_duplicate_coordinate(self):
        entries = ((0, 0, const_block(1)), (0, 1, const_block(2)), (0, 1, const_block(3)))
        with pytest.raises(MalformedStream):
            decompress(self._comp(entries))

    def test_coordinate_out_of_range(self):
        entries = ((0, 0, const_block(1)), (5, 0, const_block(2)))
        with pytest.raises(MalformedStream):
            decompress(self._comp(entries))

    def test_wrong_block_shape(self):
        entries = ((0, 0, const_block(1)), (0, 1, const_block(2, block_size=3)))
        with pytest.raises(ConfigMismatch):
            decompress(self._comp(entries))
