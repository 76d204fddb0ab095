"""Vectorized numpy implementations of the estimator kernels.

Same contracts as the compiled module ``_core``; used when the extension
is unavailable or explicitly requested via TAILSUM_KERNEL=numpy.
"""

import math

import numpy as np
from scipy.special import erfc

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def crude_chunk(x: np.ndarray, u: float) -> int:
    """Number of rows of the sample matrix whose row sum exceeds u."""
    return int(np.count_nonzero(x.sum(axis=1) > u))


def conditional_chunk(y, umix, out, u, lam, bg, others, alpha, cond_sd,
                      shift, tilt_vec, tilt_const, mix):
    """Per-draw integrand of the conditional largest-claim estimator.

    For each draw (row of the correlated standard-normal matrix ``y``)
    accumulates, over margins j, the importance weight times the
    conditional probability that margin j exceeds both the remaining gap
    to u and the largest other margin.  ``umix`` supplies the uniforms
    selecting the defensive-mixture component; ``mix`` is the shifted
    component's weight (0 disables tilting).  Writes the per-draw sums
    into ``out``.
    """
    d = y.shape[1]
    log_mix = math.log(mix) if mix > 0.0 else -math.inf
    log_1m = math.log1p(-mix) if mix < 1.0 else -math.inf
    out[:] = 0.0
    for j in range(d):
        oth = others[j]
        yo = y[:, oth]
        if mix > 0.0:
            picked = umix[:, j] < mix
            yo = yo + np.where(picked[:, None], shift[j], 0.0)
            q = yo @ tilt_vec[j] - tilt_const[j]
            w = np.exp(-np.logaddexp(log_mix + q, log_1m))
        else:
            w = 1.0
        xo = lam[oth] * np.exp(bg[oth] * yo)
        threshold = np.maximum(xo.max(axis=1), u - xo.sum(axis=1))
        z = (np.log(threshold / lam[j]) / bg[j] - yo @ alpha[j]) / cond_sd[j]
        out += w * 0.5 * erfc(z * _INV_SQRT2)
