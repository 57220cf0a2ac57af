"""Pure-NumPy witness kernel (fallback backend).

Same contract as the compiled kernel in ``_kernels.pyx``: given flat float64
arrays of the six Gaussian coefficients (complex ones split into re/im),
return the two nonclassicality depths per mode, the global depth, the
logarithmic negativity, the smallest symplectic eigenvalue of the partially
transposed covariance matrix, and a flag byte per point.

This backend leans on LAPACK (batched ``eigvalsh``/``det``), which makes it an
independent implementation of the same math as the compiled Jacobi kernel;
the two are cross-checked by the parity tests.
"""

from __future__ import annotations

import numpy as np

FLAG_EXCEEDS_GAUSSIAN = 1
FLAG_NONPHYSICAL = 2
FLAG_COMPLEX_SYMPLECTIC = 4

#: discriminants below this signal a genuinely complex symplectic eigenvalue
DISC_TOL = -1e-12


def witness_batch(B1, B2, C1r, C1i, C2r, C2i, Dr, Di, Dbr, Dbi):
    """Vectorized nonclassicality depths and negativity.

    Returns (tau, tau1, tau2, EN, nu_min, flags); EN and nu_min are NaN where
    the symplectic eigenvalue comes out complex (nonphysical coefficient set).
    """
    B1 = np.ascontiguousarray(B1, dtype=float)
    B2 = np.ascontiguousarray(B2, dtype=float)
    n = B1.shape[0]
    finite = np.isfinite(B1) & np.isfinite(B2)
    for part in (C1r, C1i, C2r, C2i, Dr, Di, Dbr, Dbi):
        finite &= np.isfinite(part)
    if not finite.all():
        # rows with divergent coefficients (e.g. the sink family at the
        # exceptional points) yield NaN witnesses instead of poisoning the
        # batched LAPACK calls
        B1 = np.where(finite, B1, 0.0)
        B2 = np.where(finite, B2, 0.0)
        C1r, C1i, C2r, C2i, Dr, Di, Dbr, Dbi = (
            np.where(finite, a, 0.0) for a in (C1r, C1i, C2r, C2i, Dr, Di, Dbr, Dbi)
        )
    C1 = C1r + 1j * C1i
    C2 = C2r + 1j * C2i
    D = Dr + 1j * Di
    Db = Dbr + 1j * Dbi

    K = np.zeros((n, 4, 4), dtype=complex)
    K[:, 0, 0] = -B1
    K[:, 1, 1] = -B1
    K[:, 2, 2] = -B2
    K[:, 3, 3] = -B2
    K[:, 0, 1] = np.conj(C1)
    K[:, 1, 0] = C1
    K[:, 2, 3] = np.conj(C2)
    K[:, 3, 2] = C2
    K[:, 0, 2] = np.conj(Db)
    K[:, 2, 0] = Db
    K[:, 1, 3] = Db
    K[:, 3, 1] = np.conj(Db)
    K[:, 0, 3] = D
    K[:, 3, 0] = np.conj(D)
    K[:, 1, 2] = np.conj(D)
    K[:, 2, 1] = D

    lam_max = np.linalg.eigvalsh(K)[:, -1]
    tau = np.maximum(0.0, lam_max)
    tau1 = np.maximum(0.0, np.abs(C1) - B1)
    tau2 = np.maximum(0.0, np.abs(C2) - B2)

    sig = np.zeros((n, 4, 4), dtype=float)
    sig[:, 0, 0] = 1.0 + 2.0 * B1 + 2.0 * C1.real
    sig[:, 1, 1] = 1.0 + 2.0 * B1 - 2.0 * C1.real
    sig[:, 0, 1] = sig[:, 1, 0] = 2.0 * C1.imag
    sig[:, 2, 2] = 1.0 + 2.0 * B2 + 2.0 * C2.real
    sig[:, 3, 3] = 1.0 + 2.0 * B2 - 2.0 * C2.real
    sig[:, 2, 3] = sig[:, 3, 2] = -2.0 * C2.imag
    x00 = 2.0 * (D - Db).real
    x01 = 2.0 * (-D + Db).imag
    x10 = 2.0 * (D + Db).imag
    x11 = 2.0 * (D + Db).real
    sig[:, 0, 2] = sig[:, 2, 0] = x00
    sig[:, 0, 3] = sig[:, 3, 0] = x01
    sig[:, 1, 2] = sig[:, 2, 1] = x10
    sig[:, 1, 3] = sig[:, 3, 1] = x11

    det1 = sig[:, 0, 0] * sig[:, 1, 1] - sig[:, 0, 1] ** 2
    det2 = sig[:, 2, 2] * sig[:, 3, 3] - sig[:, 2, 3] ** 2
    det12 = x00 * x11 - x01 * x10
    delta = det1 + det2 + 2.0 * det12
    Delta = np.linalg.det(sig)
    disc = 0.25 * delta * delta - Delta

    flags = np.zeros(n, dtype=np.uint8)
    flags[tau > 0.5] |= FLAG_EXCEEDS_GAUSSIAN
    flags[tau > 1.0] |= FLAG_NONPHYSICAL

    # scale-aware thresholds: see ptmodes.witnesses.negativity
    disc_scale = np.maximum(1.0, np.maximum(0.25 * delta * delta, np.abs(Delta)))
    bad = disc < DISC_TOL * disc_scale
    nu2 = 0.5 * delta - np.sqrt(np.maximum(disc, 0.0))
    bad |= nu2 < DISC_TOL * np.maximum(1.0, np.abs(delta))
    flags[bad] |= FLAG_COMPLEX_SYMPLECTIC
    nu_min = np.sqrt(np.maximum(nu2, 0.0))
    with np.errstate(divide="ignore"):
        EN = np.maximum(0.0, -np.log(nu_min))
    EN[bad] = np.nan
    nu_min = np.where(bad, np.nan, nu_min)
    if not finite.all():
        for arr in (tau, tau1, tau2, EN, nu_min):
            arr[~finite] = np.nan
        flags[~finite] = 0
    return tau, tau1, tau2, EN, nu_min, flags
