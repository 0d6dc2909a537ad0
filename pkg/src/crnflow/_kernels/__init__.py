"""Numeric kernels with two interchangeable backends.

The compiled backend is selected by default when numba imports cleanly; the
environment variable ``CRNFLOW_NUMBA`` forces the choice (``0``/``false`` for
the pure-numpy fallback, ``1``/``true`` to require the compiled kernels).
Both backends implement the same five functions with identical contracts, so
results differ only by floating-point rounding.
"""

from __future__ import annotations

import os

_choice = os.environ.get("CRNFLOW_NUMBA", "auto").strip().lower()
if _choice in {"0", "false", "no", "off", "numpy"}:
    from . import _numpy as _impl

    BACKEND = "numpy"
elif _choice in {"1", "true", "yes", "on", "numba"}:
    from . import _numba as _impl

    BACKEND = "numba"
else:
    try:
        from . import _numba as _impl

        BACKEND = "numba"
    except ImportError:
        from . import _numpy as _impl

        BACKEND = "numpy"

FD_EPS = _impl.FD_EPS
rates = _impl.rates
face_fluxes = _impl.face_fluxes
residual = _impl.residual
jacobian_blocks = _impl.jacobian_blocks
solve_block_tridiag = _impl.solve_block_tridiag

__all__ = [
    "BACKEND",
    "FD_EPS",
    "rates",
    "face_fluxes",
    "residual",
    "jacobian_blocks",
    "solve_block_tridiag",
]
