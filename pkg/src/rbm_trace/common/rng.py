"""Counter-based randomness.

Every random draw in rbm-trace is a pure function of a 64-bit seed and a position in a stream, never of the order in
which work was scheduled. Gaussian increments for step ``k`` of a path come from block ``k // BLOCK_SIZE``, a fresh
Philox stream keyed by the seed whose counter starts at ``block << 64``; blocks therefore never overlap, and any
block can be regenerated on its own (this is what makes path extension bitwise reproducible).
"""

import hashlib
import struct

import numpy as np

BLOCK_SIZE = 1 << 16
MASK_64 = (1 << 64) - 1


def derive_seed(master_seed: int, index: int, stream: int = 0) -> int:
    """Stable 64-bit hash of ``(master_seed, index, stream)``.

    ``stream`` separates independent uses of the same path index (e.g. the RBM increments and the subordinator
    increments of one path).
    """
    payload = struct.pack("<QQQ", master_seed & MASK_64, index & MASK_64, stream & MASK_64)
    digest = hashlib.blake2b(payload, digest_size=8, person=b"rbm-trace").digest()
    return int.from_bytes(digest, "little")


def block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed & MASK_64, counter=block << 64))


def gaussian_block(seed: int, block: int, n: int) -> np.ndarray:
    """The ``(BLOCK_SIZE, n)`` array of standard normals of block ``block``."""
    return block_generator(seed, block).standard_normal((BLOCK_SIZE, n))


def gaussian_increments(seed: int, k0: int, k1: int, n: int) -> np.ndarray:
    """Standard normal increments for steps ``k0 <= k < k1``, shape ``(k1 - k0, n)``."""
    if k1 < k0:
        raise ValueError(f"Expected k0 <= k1, got k0={k0}, k1={k1}.")
    out = np.empty((k1 - k0, n), dtype=np.float64)
    k = k0
    while k < k1:
        block = k // BLOCK_SIZE
        lo = k - block * BLOCK_SIZE
        hi = min(BLOCK_SIZE, k1 - block * BLOCK_SIZE)
        out[k - k0 : k - k0 + (hi - lo)] = gaussian_block(seed, block, n)[lo:hi]
        k += hi - lo
    return out
