"""Propagate the PMLFS_THREADS cap to the BLAS thread-pool env vars.

Must be imported before numpy so the limits take effect; keeping results
reproducible requires a fixed thread count, so PMLFS_THREADS=1 pins every
backend to a single thread.
"""

import os

_BLAS_VARS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)


def apply_thread_cap() -> None:
    cap = os.environ.get("PMLFS_THREADS")
    if not cap:
        return
    for var in _BLAS_VARS:
        os.environ.setdefault(var, cap)


apply_thread_cap()
