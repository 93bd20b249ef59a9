"""Counter-based fan-out of one master seed into per-stage seeds.

Every randomized stage draws from its own child stream keyed by a fixed
counter, so rerunning a single stage (or a single command) with the same
master seed reproduces it independently of the others.
"""

from __future__ import annotations

import numpy as np

from .errors import ContractError

_STAGE_COUNTERS = {
    "noise": 1,
    "factors": 2,
    "folds": 3,
    "synth-features": 4,
    "synth-coefficients": 5,
}


def derive_seed(master: int, stage: str) -> int:
    """A 64-bit child seed for a named stage of the pipeline."""
    if stage not in _STAGE_COUNTERS:
        raise ContractError(f"unknown seeding stage {stage!r}")
    ss = np.random.SeedSequence(master, spawn_key=(_STAGE_COUNTERS[stage],))
    hi, lo = ss.generate_state(2, dtype=np.uint32)
    return (int(hi) << 32) | int(lo)
