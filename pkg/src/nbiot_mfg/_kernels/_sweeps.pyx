# cython: boundscheck=False, wraparound=False, cdivision=False, language_level=3
"""Compiled sweep kernels.

Arithmetic is kept expression-for-expression identical to the pure-Python
reference module (reference.py); with IEEE double semantics both backends
produce bit-identical fields.
"""

BACKEND = "cython"


def fpk_sweep_kernel(double[:, ::1] p, double[:, ::1] src, double r_tr,
                     double d_e, double d_b, double scale, double[:, ::1] out):
    cdef Py_ssize_t nx = p.shape[0] - 1
    cdef Py_ssize_t ny = p.shape[1] - 1
    cdef double cb = r_tr / d_b
    cdef Py_ssize_t i, j
    for i in range(nx - 1, -1, -1):
        for j in range(ny - 1, -1, -1):
            out[i, j] = (scale * src[i, j] + (p[i + 1, j] / d_e) * out[i + 1, j] + cb * out[i, j + 1]) / (
                p[i, j] / d_e + cb
            )


def adjoint_sweep_kernel(double[:, ::1] p, double[:, ::1] f, double r_tr,
                         double d_e, double d_b, double[:, ::1] out):
    cdef Py_ssize_t nx = p.shape[0] - 1
    cdef Py_ssize_t ny = p.shape[1] - 1
    cdef double cb = r_tr / d_b
    cdef Py_ssize_t i, j
    for i in range(1, nx + 1):
        for j in range(1, ny + 1):
            out[i, j] = (-f[i, j] + (p[i, j] / d_e) * out[i - 1, j] + cb * out[i, j - 1]) / (
                p[i, j] / d_e + cb
            )
