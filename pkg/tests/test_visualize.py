"""Mask overlay rendering."""

import numpy as np
import pytest

from conftest import image_from_array
from pxprune import CodecConfig, ConfigMismatch, RetainMask, compute_retain_mask, render_overlay


def _blend(px):
    return (6 * 128 + 4 * int(px) + 5) // 10


def test_uniform_image_grays_all_but_anchor():
    img = image_from_array(np.full((8, 8, 1), 200, dtype=np.uint8))
    cfg = CodecConfig(block_size=4)
    mask = compute_retain_mask(img, cfg)
    out = render_overlay(img, mask, cfg.block_size)
    assert np.all(out.pixels[:4, :4] == 200)  # anchor untouched
    expected = _blend(200)
    assert np.all(out.pixels[:4, 4:] == expected)
    assert np.all(out.pixels[4:, :] == expected)


def test_blocks_follow_mask_statistics(rng):
    # left half uniform, right half noise: noise half must stay in color
    left = np.full((8, 8, 3), 90, dtype=np.uint8)
    right = rng.integers(0, 256, size=(8, 8, 3), dtype=np.uint8)
    img = image_from_array(np.concatenate([left, right], axis=1))
    cfg = CodecConfig(block_size=4)
    mask = compute_retain_mask(img, cfg)
    out = render_overlay(img, mask, cfg.block_size)
    for r in range(mask.rows):
        for c in range(mask.cols):
            src = img.pixels[r * 4:(r + 1) * 4, c * 4:(c + 1) * 4].astype(np.int64)
            got = out.pixels[r * 4:(r + 1) * 4, c * 4:(c + 1) * 4].astype(np.int64)
            if mask.kept[r, c]:
                assert np.array_equal(got, src)
            else:
                ref = (6 * 128 + 4 * src + 5) // 10
                assert np.array_equal(got, ref)
    # the noise half is all kept
    assert mask.kept[:, 2:].all()


def test_external_mask_is_honored(rng):
    img = image_from_array(rng.integers(0, 256, size=(8, 8, 1), dtype=np.uint8))
    kept = np.zeros((2, 2), dtype=bool)
    kept[1, 1] = True
    out = render_overlay(img, RetainMask(kept), 4)
    assert np.array_equal(out.pixels[4:, 4:], img.pixels[4:, 4:])
    assert not np.array_equal(out.pixels[:4, :4], img.pixels[:4, :4])


def test_padded_image_still_renders(rng):
    img = image_from_array(rng.integers(0, 256, size=(6, 7, 1), dtype=np.uint8))
    kept = np.ones((2, 2), dtype=bool)
    out = render_overlay(img, RetainMask(kept), 4)
    assert (out.height, out.width) == (6, 7)
    assert np.array_equal(out.pixels, img.pixels)


def test_mismatched_mask_rejected(rng):
    img = image_from_array(rng.integers(0, 256, size=(8, 8, 1), dtype=np.uint8))
    with pytest.raises(ConfigMismatch):
        render_overlay(img, RetainMask(np.ones((5, 5), dtype=bool)), 4)
