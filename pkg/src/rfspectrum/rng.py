"""Counter-based SplitMix64 streams and the samplers built on them.

The generator is SplitMix64 (a Weyl sequence passed through a
xorshift-multiply finalizer).  Output ``i`` of the stream seeded with ``s``
is ``mix(s + (i + 1) * GOLDEN)``, so a whole block is produced with a few
vectorized uint64 operations and is reproducible in any language with
wrapping 64-bit integers.

Uniforms take the top 53 bits; normals use the Box-Muller transform.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

# multiplier for per-trial seed derivation: seed ^ (trial * TRIAL_STRIDE)
TRIAL_STRIDE = 0xD1B54A32D192ED03


def _as_u64(seed):
    return int(seed) & MASK64


def splitmix64(seed, count, offset=0):
    """Return ``count`` consecutive SplitMix64 outputs as a uint64 array.

    ``offset`` skips that many outputs, so ``splitmix64(s, n, k)`` equals
    ``splitmix64(s, n + k)[k:]``.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    idx = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    z = np.uint64(_as_u64(seed)) + idx * np.uint64(GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def splitmix64_scalar(seed, count):
    """Reference scalar implementation on Python ints."""
    state = _as_u64(seed)
    out = []
    for _ in range(count):
        state = (state + GOLDEN) & MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        out.append(z ^ (z >> 31))
    return out


def trial_seed(seed, trial):
    """Seed of the independent stream used by trial number ``trial``."""
    return _as_u64(seed) ^ ((int(trial) * TRIAL_STRIDE) & MASK64)


def child_seeds(seed, count):
    """Derive ``count`` sub-stream seeds (e.g. data and weights) from one seed."""
    return [int(s) for s in splitmix64(seed, count)]


def uniform(seed, count):
    """Uniform doubles on [0, 1) with 53 random bits each."""
    bits = splitmix64(seed, count) >> np.uint64(11)
    return bits.astype(np.float64) * (1.0 / 9007199254740992.0)


def standard_normal(seed, count):
    """Standard normal draws by Box-Muller, consuming two uniforms per pair."""
    pairs = (count + 1) // 2
    u = uniform(seed, 2 * pairs)
    u1 = 1.0 - u[0::2]  # in (0, 1], log is finite
    u2 = u[1::2]
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    out = np.empty(2 * pairs)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out[:count]


def random_signs(seed, count):
    """+1.0 / -1.0 with equal probability, from the top bit of each output."""
    top = splitmix64(seed, count) >> np.uint64(63)
    return 1.0 - 2.0 * top.astype(np.float64)
