"""Pure-Python reference implementation of the sweep kernels.

Kept expression-for-expression identical to the compiled Cython module so
both backends produce bit-identical fields; the compiled module only
removes interpreter overhead from the serial recurrences.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def fpk_sweep_kernel(p, src, r_tr, d_e, d_b, scale, out):
    """March the stationary transport recurrence from the zero boundary.

    ``out`` must be zero-filled with the same (X+1, Y+1) shape as ``p``;
    rows i = X and columns j = Y stay pinned at zero.
    """
    nx = p.shape[0] - 1
    ny = p.shape[1] - 1
    cb = r_tr / d_b
    for i in range(nx - 1, -1, -1):
        for j in range(ny - 1, -1, -1):
            out[i, j] = (scale * src[i, j] + (p[i + 1, j] / d_e) * out[i + 1, j] + cb * out[i, j + 1]) / (
                p[i, j] / d_e + cb
            )


def adjoint_sweep_kernel(p, f, r_tr, d_e, d_b, out):
    """March the multiplier recurrence upward from the zero boundary.

    ``out`` must be zero-filled; row i = 0 and column j = 0 stay pinned.
    """
    nx = p.shape[0] - 1
    ny = p.shape[1] - 1
    cb = r_tr / d_b
    for i in range(1, nx + 1):
        for j in range(1, ny + 1):
            out[i, j] = (-f[i, j] + (p[i, j] / d_e) * out[i - 1, j] + cb * out[i, j - 1]) / (
                p[i, j] / d_e + cb
            )
