import numpy as np
import pytest

from rbm_trace.common.rng import BLOCK_SIZE, derive_seed, gaussian_block, gaussian_increments


def test_derive_seed_is_stable_and_separates_streams():
    a = derive_seed(42, 3, 0)
    assert a == derive_seed(42, 3, 0)
    assert 0 <= a < 2**64
    assert a != derive_seed(42, 3, 1)
    assert a != derive_seed(42, 4, 0)
    assert a != derive_seed(43, 3, 0)


def test_gaussian_increments_depend_only_on_seed_and_step():
    """Any sub-range of the stream, including one straddling a block boundary, matches the full draw."""
    full = gaussian_increments(7, 0, BLOCK_SIZE + 100, 2)
    part = gaussian_increments(7, BLOCK_SIZE - 50, BLOCK_SIZE + 60, 2)
    np.testing.assert_array_equal(part, full[BLOCK_SIZE - 50 : BLOCK_SIZE + 60])
    np.testing.assert_array_equal(gaussian_block(7, 1, 2)[:100], full[BLOCK_SIZE:])


def test_gaussian_increments_empty_and_invalid_range():
    assert gaussian_increments(1, 5, 5, 3).shape == (0, 3)
    with pytest.raises(ValueError, match="k0 <= k1"):
        gaussian_increments(1, 5, 4, 3)
