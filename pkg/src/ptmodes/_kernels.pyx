# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled witness kernel.

Self-contained cyclic Jacobi eigensolver for the 4x4 Hermitian
ordering-parameter matrix plus closed-form symplectic negativity, looped over
flat coefficient arrays.  Mirrors the contract of ``_kernels_py.witness_batch``.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, NAN, fabs, isfinite, log, sqrt

cnp.import_array()

DEF DISC_TOL = -1e-12

FLAG_EXCEEDS_GAUSSIAN = 1
FLAG_NONPHYSICAL = 2
FLAG_COMPLEX_SYMPLECTIC = 4


cdef double _jacobi_lambda_max(double complex[4][4] A) noexcept nogil:
    """Largest eigenvalue of a 4x4 Hermitian matrix by cyclic Jacobi sweeps."""
    cdef int p, q, r, sweep
    cdef double scale, off, app, aqq, m, tau, t, c, s, best
    cdef double complex apq, e, ec, arp, arq, apr, aqr
    scale = 0.0
    for p in range(4):
        for q in range(4):
            m = fabs(A[p][q].real) + fabs(A[p][q].imag)
            if m > scale:
                scale = m
    if scale == 0.0:
        return 0.0
    for sweep in range(50):
        off = 0.0
        for p in range(3):
            for q in range(p + 1, 4):
                off += A[p][q].real * A[p][q].real + A[p][q].imag * A[p][q].imag
        if off <= 1e-26 * scale * scale:
            break
        for p in range(3):
            for q in range(p + 1, 4):
                apq = A[p][q]
                m = sqrt(apq.real * apq.real + apq.imag * apq.imag)
                if m <= 1e-15 * scale:
                    continue
                e = apq / m
                app = A[p][p].real
                aqq = A[q][q].real
                tau = (aqq - app) / (2.0 * m)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                ec = e.conjugate()
                # column rotation: col_p <- c col_p - s e* col_q ; col_q <- s col_p + c e* col_q
                for r in range(4):
                    arp = A[r][p]
                    arq = A[r][q]
                    A[r][p] = c * arp - s * arq * ec
                    A[r][q] = s * arp + c * arq * ec
                # row rotation: row_p <- c row_p - s e row_q ; row_q <- s row_p + c e row_q
                for r in range(4):
                    apr = A[p][r]
                    aqr = A[q][r]
                    A[p][r] = c * apr - s * e * aqr
                    A[q][r] = s * apr + c * e * aqr
                A[p][q] = 0.0
                A[q][p] = 0.0
    best = A[0][0].real
    for p in range(1, 4):
        if A[p][p].real > best:
            best = A[p][p].real
    return best


cdef double _det4(double[4][4] a) noexcept nogil:
    """Determinant of a real 4x4 matrix by LU with partial pivoting."""
    cdef int i, j, k, piv
    cdef double det, big, tmp, f
    det = 1.0
    for k in range(4):
        piv = k
        big = fabs(a[k][k])
        for i in range(k + 1, 4):
            if fabs(a[i][k]) > big:
                big = fabs(a[i][k])
                piv = i
        if big == 0.0:
            return 0.0
        if piv != k:
            det = -det
            for j in range(4):
                tmp = a[k][j]
                a[k][j] = a[piv][j]
                a[piv][j] = tmp
        det *= a[k][k]
        for i in range(k + 1, 4):
            f = a[i][k] / a[k][k]
            for j in range(k + 1, 4):
                a[i][j] -= f * a[k][j]
    return det


def witness_batch(double[::1] B1, double[::1] B2,
                  double[::1] C1r, double[::1] C1i,
                  double[::1] C2r, double[::1] C2i,
                  double[::1] Dr, double[::1] Di,
                  double[::1] Dbr, double[::1] Dbi):
    """See ``ptmodes._kernels_py.witness_batch`` for the contract."""
    cdef Py_ssize_t n = B1.shape[0]
    cdef cnp.ndarray[double, ndim=1] tau = np.empty(n)
    cdef cnp.ndarray[double, ndim=1] tau1 = np.empty(n)
    cdef cnp.ndarray[double, ndim=1] tau2 = np.empty(n)
    cdef cnp.ndarray[double, ndim=1] EN = np.empty(n)
    cdef cnp.ndarray[double, ndim=1] nu_min = np.empty(n)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] flags = np.zeros(n, dtype=np.uint8)

    cdef double complex K[4][4]
    cdef double sig[4][4]
    cdef double complex c1, c2, d, db
    cdef double b1, b2, lam, t_, x00, x01, x10, x11
    cdef double det1, det2, det12, delta, Delta, disc, nu2, nm
    cdef int fl
    cdef Py_ssize_t i, r, s_

    for i in range(n):
        if not (isfinite(B1[i]) and isfinite(B2[i]) and isfinite(C1r[i])
                and isfinite(C1i[i]) and isfinite(C2r[i]) and isfinite(C2i[i])
                and isfinite(Dr[i]) and isfinite(Di[i]) and isfinite(Dbr[i])
                and isfinite(Dbi[i])):
            # divergent coefficient rows: NaN witnesses, no flags
            tau[i] = NAN; tau1[i] = NAN; tau2[i] = NAN
            EN[i] = NAN; nu_min[i] = NAN
            flags[i] = 0
            continue
        b1 = B1[i]; b2 = B2[i]
        c1 = C1r[i] + 1j * C1i[i]
        c2 = C2r[i] + 1j * C2i[i]
        d = Dr[i] + 1j * Di[i]
        db = Dbr[i] + 1j * Dbi[i]

        K[0][0] = -b1; K[1][1] = -b1; K[2][2] = -b2; K[3][3] = -b2
        K[0][1] = c1.conjugate(); K[1][0] = c1
        K[2][3] = c2.conjugate(); K[3][2] = c2
        K[0][2] = db.conjugate(); K[2][0] = db
        K[1][3] = db;             K[3][1] = db.conjugate()
        K[0][3] = d;              K[3][0] = d.conjugate()
        K[1][2] = d.conjugate();  K[2][1] = d

        lam = _jacobi_lambda_max(K)
        tau[i] = lam if lam > 0.0 else 0.0
        t_ = sqrt(c1.real * c1.real + c1.imag * c1.imag) - b1
        tau1[i] = t_ if t_ > 0.0 else 0.0
        t_ = sqrt(c2.real * c2.real + c2.imag * c2.imag) - b2
        tau2[i] = t_ if t_ > 0.0 else 0.0

        fl = 0
        if tau[i] > 0.5:
            fl |= 1
        if tau[i] > 1.0:
            fl |= 2

        x00 = 2.0 * (d.real - db.real)
        x01 = 2.0 * (-d.imag + db.imag)
        x10 = 2.0 * (d.imag + db.imag)
        x11 = 2.0 * (d.real + db.real)
        for r in range(4):
            for s_ in range(4):
                sig[r][s_] = 0.0
        sig[0][0] = 1.0 + 2.0 * b1 + 2.0 * c1.real
        sig[1][1] = 1.0 + 2.0 * b1 - 2.0 * c1.real
        sig[0][1] = 2.0 * c1.imag; sig[1][0] = sig[0][1]
        sig[2][2] = 1.0 + 2.0 * b2 + 2.0 * c2.real
        sig[3][3] = 1.0 + 2.0 * b2 - 2.0 * c2.real
        sig[2][3] = -2.0 * c2.imag; sig[3][2] = sig[2][3]
        sig[0][2] = x00; sig[2][0] = x00
        sig[0][3] = x01; sig[3][0] = x01
        sig[1][2] = x10; sig[2][1] = x10
        sig[1][3] = x11; sig[3][1] = x11

        det1 = sig[0][0] * sig[1][1] - sig[0][1] * sig[0][1]
        det2 = sig[2][2] * sig[3][3] - sig[2][3] * sig[2][3]
        det12 = x00 * x11 - x01 * x10
        delta = det1 + det2 + 2.0 * det12
        Delta = _det4(sig)
        disc = 0.25 * delta * delta - Delta

        # scale-aware thresholds: see ptmodes.witnesses.negativity
        scale = 0.25 * delta * delta
        if fabs(Delta) > scale:
            scale = fabs(Delta)
        if scale < 1.0:
            scale = 1.0
        if disc < DISC_TOL * scale:
            fl |= 4
            EN[i] = NAN
            nu_min[i] = NAN
        else:
            nu2 = 0.5 * delta - sqrt(disc if disc > 0.0 else 0.0)
            if nu2 < DISC_TOL * (fabs(delta) if fabs(delta) > 1.0 else 1.0):
                fl |= 4
                EN[i] = NAN
                nu_min[i] = NAN
            else:
                nm = sqrt(nu2 if nu2 > 0.0 else 0.0)
                nu_min[i] = nm
                if nm <= 0.0:
                    EN[i] = INFINITY
                elif nm < 1.0:
                    EN[i] = -log(nm)
                else:
                    EN[i] = 0.0
        flags[i] = <cnp.uint8_t> fl
    return tau, tau1, tau2, EN, nu_min, flags
