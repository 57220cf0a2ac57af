"""Witness-kernel backend selection.

The compiled Cython kernel is preferred when its extension built; the
pure-NumPy kernel is the fallback.  ``PTMODES_BACKEND=py`` or ``=c`` forces a
choice (``c`` raises if the extension is missing).  Both expose the same
``witness_batch`` contract and are cross-checked by the parity tests;
``benchmarks/bench_witness.py`` compares their throughput.
"""

from __future__ import annotations

import os

from . import _kernels_py

_requested = os.environ.get("PTMODES_BACKEND", "auto").lower()

if _requested not in ("auto", "py", "c"):
    raise ValueError(f"PTMODES_BACKEND must be auto, py or c, got {_requested!r}")

if _requested == "py":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested == "c":
            raise
        _impl = _kernels_py

FLAG_EXCEEDS_GAUSSIAN = _kernels_py.FLAG_EXCEEDS_GAUSSIAN
FLAG_NONPHYSICAL = _kernels_py.FLAG_NONPHYSICAL
FLAG_COMPLEX_SYMPLECTIC = _kernels_py.FLAG_COMPLEX_SYMPLECTIC


def backend_name() -> str:
    """'c' when the compiled kernel is active, 'py' otherwise."""
    return "py" if _impl is _kernels_py else "c"


def witness_batch(B1, B2, C1, C2, D, Dbar):
    """Batched witnesses from coefficient arrays (complex C, D, Dbar allowed).

    Thin dispatcher: splits complex inputs into contiguous re/im parts and
    calls the active kernel.  Returns (tau, tau1, tau2, EN, nu_min, flags).
    """
    import numpy as np

    B1 = np.ascontiguousarray(np.asarray(B1, dtype=float).ravel())
    B2 = np.ascontiguousarray(np.asarray(B2, dtype=float).ravel())
    C1 = np.asarray(C1, dtype=complex).ravel()
    C2 = np.asarray(C2, dtype=complex).ravel()
    D = np.asarray(D, dtype=complex).ravel()
    Db = np.asarray(Dbar, dtype=complex).ravel()
    parts = [np.ascontiguousarray(x) for x in (
        C1.real, C1.imag, C2.real, C2.imag, D.real, D.imag, Db.real, Db.imag)]
    return _impl.witness_batch(B1, B2, *parts)
