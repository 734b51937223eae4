# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled stencil kernels: fused loops for the Newton hot path.

Same contracts as _kernels_py (the numpy fallback); the test suite pins
the two implementations against each other.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

IS_COMPILED = True


def bu_1d(double[:, ::1] u, double[::1] a, double b, double hx):
    cdef Py_ssize_t nt = u.shape[0], nx = u.shape[1]
    cdef Py_ssize_t k, i, ip, im
    cdef double hx2 = hx * hx, lap, ux
    out_arr = np.empty((nt, nx))
    cdef double[:, ::1] out = out_arr
    for k in range(nt):
        for i in range(nx):
            ip = i + 1 if i + 1 < nx else 0
            im = i - 1 if i > 0 else nx - 1
            lap = (u[k, ip] - 2.0 * u[k, i] + u[k, im]) / hx2
            ux = (u[k, ip] - u[k, im]) / (2.0 * hx)
            out[k, i] = lap - b * ux * ux + a[i]
    return out_arr


def bu_2d(double[:, :, ::1] u, double[:, ::1] a, double b, double[:, ::1] em2p, double hx):
    cdef Py_ssize_t nt = u.shape[0], nx = u.shape[1], ny = u.shape[2]
    cdef Py_ssize_t k, i, j, ip, im, jp, jm
    cdef double hx2 = hx * hx, lap, ux, uy
    out_arr = np.empty((nt, nx, ny))
    cdef double[:, :, ::1] out = out_arr
    for k in range(nt):
        for i in range(nx):
            ip = i + 1 if i + 1 < nx else 0
            im = i - 1 if i > 0 else nx - 1
            for j in range(ny):
                jp = j + 1 if j + 1 < ny else 0
                jm = j - 1 if j > 0 else ny - 1
                lap = (u[k, ip, j] + u[k, im, j] + u[k, i, jp] + u[k, i, jm]
                       - 4.0 * u[k, i, j]) / hx2
                ux = (u[k, ip, j] - u[k, im, j]) / (2.0 * hx)
                uy = (u[k, i, jp] - u[k, i, jm]) / (2.0 * hx)
                out[k, i, j] = em2p[i, j] * (lap - b * (ux * ux + uy * uy)) + a[i, j]
    return out_arr


def residual_1d(double[:, ::1] u, double[::1] a, double b, double[:, ::1] target,
                double hx, double ht):
    cdef Py_ssize_t nt = u.shape[0], nx = u.shape[1]
    cdef Py_ssize_t k, i, ip, im
    cdef double hx2 = hx * hx, ht2 = ht * ht, cross = 4.0 * hx * ht
    cdef double utt, lap, ux, bu, utx
    out_arr = np.empty((nt - 2, nx))
    cdef double[:, ::1] out = out_arr
    for k in range(1, nt - 1):
        for i in range(nx):
            ip = i + 1 if i + 1 < nx else 0
            im = i - 1 if i > 0 else nx - 1
            utt = (u[k + 1, i] - 2.0 * u[k, i] + u[k - 1, i]) / ht2
            lap = (u[k, ip] - 2.0 * u[k, i] + u[k, im]) / hx2
            ux = (u[k, ip] - u[k, im]) / (2.0 * hx)
            bu = lap - b * ux * ux + a[i]
            utx = (u[k + 1, ip] - u[k + 1, im] - u[k - 1, ip] + u[k - 1, im]) / cross
            out[k - 1, i] = utt * bu - utx * utx - target[k - 1, i]
    return out_arr


def residual_2d(double[:, :, ::1] u, double[:, ::1] a, double b, double[:, ::1] em2p,
                double[:, :, ::1] target, double hx, double ht):
    cdef Py_ssize_t nt = u.shape[0], nx = u.shape[1], ny = u.shape[2]
    cdef Py_ssize_t k, i, j, ip, im, jp, jm
    cdef double hx2 = hx * hx, ht2 = ht * ht, cross = 4.0 * hx * ht
    cdef double utt, lap, ux, uy, bu, utx, uty
    out_arr = np.empty((nt - 2, nx, ny))
    cdef double[:, :, ::1] out = out_arr
    for k in range(1, nt - 1):
        for i in range(nx):
            ip = i + 1 if i + 1 < nx else 0
            im = i - 1 if i > 0 else nx - 1
            for j in range(ny):
                jp = j + 1 if j + 1 < ny else 0
                jm = j - 1 if j > 0 else ny - 1
                utt = (u[k + 1, i, j] - 2.0 * u[k, i, j] + u[k - 1, i, j]) / ht2
                lap = (u[k, ip, j] + u[k, im, j] + u[k, i, jp] + u[k, i, jm]
                       - 4.0 * u[k, i, j]) / hx2
                ux = (u[k, ip, j] - u[k, im, j]) / (2.0 * hx)
                uy = (u[k, i, jp] - u[k, i, jm]) / (2.0 * hx)
                bu = em2p[i, j] * (lap - b * (ux * ux + uy * uy)) + a[i, j]
                utx = (u[k + 1, ip, j] - u[k + 1, im, j]
                       - u[k - 1, ip, j] + u[k - 1, im, j]) / cross
                uty = (u[k + 1, i, jp] - u[k + 1, i, jm]
                       - u[k - 1, i, jp] + u[k - 1, i, jm]) / cross
                out[k - 1, i, j] = (utt * bu - em2p[i, j] * (utx * utx + uty * uty)
                                    - target[k - 1, i, j])
    return out_arr


def jet_mins_1d(double[:, ::1] u, double[::1] a, double b, double hx, double ht):
    cdef Py_ssize_t nt = u.shape[0], nx = u.shape[1]
    cdef Py_ssize_t k, i, ip, im
    cdef double hx2 = hx * hx, ht2 = ht * ht, cross = 4.0 * hx * ht
    cdef double utt, lap, ux, bu, utx, q
    cdef double min_utt = np.inf, min_bu = np.inf, min_q = np.inf
    for k in range(1, nt - 1):
        for i in range(nx):
            ip = i + 1 if i + 1 < nx else 0
            im = i - 1 if i > 0 else nx - 1
            utt = (u[k + 1, i] - 2.0 * u[k, i] + u[k - 1, i]) / ht2
            lap = (u[k, ip] - 2.0 * u[k, i] + u[k, im]) / hx2
            ux = (u[k, ip] - u[k, im]) / (2.0 * hx)
            bu = lap - b * ux * ux + a[i]
            utx = (u[k + 1, ip] - u[k + 1, im] - u[k - 1, ip] + u[k - 1, im]) / cross
            q = utt * bu - utx * utx
            if utt < min_utt:
                min_utt = utt
            if bu < min_bu:
                min_bu = bu
            if q < min_q:
                min_q = q
    return min_utt, min_bu, min_q


def jet_mins_2d(double[:, :, ::1] u, double[:, ::1] a, double b, double[:, ::1] em2p,
                double hx, double ht):
    cdef Py_ssize_t nt = u.shape[0], nx = u.shape[1], ny = u.shape[2]
    cdef Py_ssize_t k, i, j, ip, im, jp, jm
    cdef double hx2 = hx * hx, ht2 = ht * ht, cross = 4.0 * hx * ht
    cdef double utt, lap, ux, uy, bu, utx, uty, q
    cdef double min_utt = np.inf, min_bu = np.inf, min_q = np.inf
    for k in range(1, nt - 1):
        for i in range(nx):
            ip = i + 1 if i + 1 < nx else 0
            im = i - 1 if i > 0 else nx - 1
            for j in range(ny):
                jp = j + 1 if j + 1 < ny else 0
                jm = j - 1 if j > 0 else ny - 1
                utt = (u[k + 1, i, j] - 2.0 * u[k, i, j] + u[k - 1, i, j]) / ht2
                lap = (u[k, ip, j] + u[k, im, j] + u[k, i, jp] + u[k, i, jm]
                       - 4.0 * u[k, i, j]) / hx2
                ux = (u[k, ip, j] - u[k, im, j]) / (2.0 * hx)
                uy = (u[k, i, jp] - u[k, i, jm]) / (2.0 * hx)
                bu = em2p[i, j] * (lap - b * (ux * ux + uy * uy)) + a[i, j]
                utx = (u[k + 1, ip, j] - u[k + 1, im, j]
                       - u[k - 1, ip, j] + u[k - 1, im, j]) / cross
                uty = (u[k + 1, i, jp] - u[k + 1, i, jm]
                       - u[k - 1, i, jp] + u[k - 1, i, jm]) / cross
                q = utt * bu - em2p[i, j] * (utx * utx + uty * uty)
                if utt < min_utt:
                    min_utt = utt
                if bu < min_bu:
                    min_bu = bu
                if q < min_q:
                    min_q = q
    return min_utt, min_bu, min_q


def dq_apply_1d(double[:, ::1] u, double[:, ::1] w, double[::1] a, double b,
                double hx, double ht):
    cdef Py_ssize_t nt = u.shape[0], nx = u.shape[1]
    cdef Py_ssize_t k, i, ip, im
    cdef double hx2 = hx * hx, ht2 = ht * ht, cross = 4.0 * hx * ht
    cdef double utt, lap, ux, bu, utx, wtt, lapw, wx, wtx
    out_arr = np.empty((nt - 2, nx))
    cdef double[:, ::1] out = out_arr
    for k in range(1, nt - 1):
        for i in range(nx):
            ip = i + 1 if i + 1 < nx else 0
            im = i - 1 if i > 0 else nx - 1
            utt = (u[k + 1, i] - 2.0 * u[k, i] + u[k - 1, i]) / ht2
            lap = (u[k, ip] - 2.0 * u[k, i] + u[k, im]) / hx2
            ux = (u[k, ip] - u[k, im]) / (2.0 * hx)
            bu = lap - b * ux * ux + a[i]
            utx = (u[k + 1, ip] - u[k + 1, im] - u[k - 1, ip] + u[k - 1, im]) / cross
            wtt = (w[k + 1, i] - 2.0 * w[k, i] + w[k - 1, i]) / ht2
            lapw = (w[k, ip] - 2.0 * w[k, i] + w[k, im]) / hx2
            wx = (w[k, ip] - w[k, im]) / (2.0 * hx)
            wtx = (w[k + 1, ip] - w[k + 1, im] - w[k - 1, ip] + w[k - 1, im]) / cross
            out[k - 1, i] = (utt * (lapw - 2.0 * b * ux * wx) + bu * wtt
                             - 2.0 * utx * wtx)
    return out_arr


def dq_apply_2d(double[:, :, ::1] u, double[:, :, ::1] w, double[:, ::1] a, double b,
                double[:, ::1] em2p, double hx, double ht):
    cdef Py_ssize_t nt = u.shape[0], nx = u.shape[1], ny = u.shape[2]
    cdef Py_ssize_t k, i, j, ip, im, jp, jm
    cdef double hx2 = hx * hx, ht2 = ht * ht, cross = 4.0 * hx * ht
    cdef double utt, lap, ux, uy, bu, utx, uty
    cdef double wtt, lapw, wx, wy, wtx, wty, ee
    out_arr = np.empty((nt - 2, nx, ny))
    cdef double[:, :, ::1] out = out_arr
    for k in range(1, nt - 1):
        for i in range(nx):
            ip = i + 1 if i + 1 < nx else 0
            im = i - 1 if i > 0 else nx - 1
            for j in range(ny):
                jp = j + 1 if j + 1 < ny else 0
                jm = j - 1 if j > 0 else ny - 1
                ee = em2p[i, j]
                utt = (u[k + 1, i, j] - 2.0 * u[k, i, j] + u[k - 1, i, j]) / ht2
                lap = (u[k, ip, j] + u[k, im, j] + u[k, i, jp] + u[k, i, jm]
                       - 4.0 * u[k, i, j]) / hx2
                ux = (u[k, ip, j] - u[k, im, j]) / (2.0 * hx)
                uy = (u[k, i, jp] - u[k, i, jm]) / (2.0 * hx)
                bu = ee * (lap - b * (ux * ux + uy * uy)) + a[i, j]
                utx = (u[k + 1, ip, j] - u[k + 1, im, j]
                       - u[k - 1, ip, j] + u[k - 1, im, j]) / cross
                uty = (u[k + 1, i, jp] - u[k + 1, i, jm]
                       - u[k - 1, i, jp] + u[k - 1, i, jm]) / cross
                wtt = (w[k + 1, i, j] - 2.0 * w[k, i, j] + w[k - 1, i, j]) / ht2
                lapw = (w[k, ip, j] + w[k, im, j] + w[k, i, jp] + w[k, i, jm]
                        - 4.0 * w[k, i, j]) / hx2
                wx = (w[k, ip, j] - w[k, im, j]) / (2.0 * hx)
                wy = (w[k, i, jp] - w[k, i, jm]) / (2.0 * hx)
                wtx = (w[k + 1, ip, j] - w[k + 1, im, j]
                       - w[k - 1, ip, j] + w[k - 1, im, j]) / cross
                wty = (w[k + 1, i, jp] - w[k + 1, i, jm]
                       - w[k - 1, i, jp] + w[k - 1, i, jm]) / cross
                out[k - 1, i, j] = (utt * (ee * lapw - 2.0 * b * ee * (ux * wx + uy * wy))
                                    + bu * wtt - 2.0 * ee * (utx * wtx + uty * wty))
    return out_arr
