"""Deterministic random-number plumbing.

Every stochastic operation in the package draws from a numpy ``Generator``
backed by PCG64, seeded explicitly.  PCG64 is a named, portable algorithm:
the same seed produces the same stream on every platform and numpy build,
which is what makes run manifests replayable bit-for-bit.

Derived seeds (per block, per sample, per reservoir) come from
``numpy.random.SeedSequence`` over integer component tuples rather than
Python's ``hash``, which is salted per process and therefore useless for
reproducibility.
"""

from __future__ import annotations

import numpy as np

from .validation import check_seed

__all__ = ["rng_from_seed", "derive_seed"]

# Fixed tags keep independent consumers of one master seed on disjoint
# streams even when their other components collide.
TAG_RESERVOIR = 0x52455356  # "RESV"
TAG_BLOCK = 0x424C4F43  # "BLOC"
TAG_SAMPLE = 0x53414D50  # "SAMP"
TAG_GRID = 0x47524944  # "GRID"


def rng_from_seed(seed: int) -> np.random.Generator:
    """A PCG64 generator seeded with ``seed``."""
    return np.random.Generator(np.random.PCG64(check_seed(seed)))


def derive_seed(master_seed: int, *components: int) -> int:
    """Derive a child seed from a master seed and integer components.

    Deterministic across platforms and processes.  Distinct component
    tuples give statistically independent child seeds; the component count
    is folded in because SeedSequence alone ignores trailing zero words.
    """
    ss = np.random.SeedSequence([int(master_seed), len(components),
                                 *[int(c) for c in components]])
    return int(ss.generate_state(2, dtype=np.uint64)[0])
