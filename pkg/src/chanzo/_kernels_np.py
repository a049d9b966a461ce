"""Reference numpy implementations of the hot numeric kernels.

The compiled extension (`chanzo._fast`) implements the same five functions
with identical signatures and semantics; `chanzo.kernels` picks one backend
at import time. Keep the two in lockstep.
"""

import numpy as np


def ris_response(coeffs, phases, direct):
    """End-to-end narrowband gain of a phase-controlled reflecting surface:
    direct + sum_m coeffs[m] * exp(j*phases[m])."""
    return complex(direct + np.exp(1j * phases) @ coeffs)


def ris_response_batch(coeffs, phases_mat, direct):
    """ris_response for each row of phases_mat; returns a complex vector."""
    return np.exp(1j * phases_mat) @ coeffs + direct


def ma_response(gains, dirs, wavelength, pos):
    """Field-response gain at a 2-D antenna position: sum_k gains[k] *
    exp(j * 2*pi/wavelength * <pos, dirs[k]>)."""
    phase = (2.0 * np.pi / wavelength) * (dirs @ pos)
    return complex(np.exp(1j * phase) @ gains)


def ma_response_batch(gains, dirs, wavelength, positions):
    """ma_response for each row of positions; returns a complex vector."""
    phase = (2.0 * np.pi / wavelength) * (positions @ dirs.T)
    return np.exp(1j * phase) @ gains


def csm_tally(powers, codes, n_values):
    """Conditional power tallies for sample-mean phase selection.

    codes[n, m] is the phase-book index element m used in probe n. Returns
    (sums, counts) of shape (n_values, M): sums[v, m] totals the measured
    power of probes where element m used value v, counts[v, m] how many.
    """
    n_probes, n_elem = codes.shape
    sums = np.zeros((n_values, n_elem))
    counts = np.zeros((n_values, n_elem), dtype=np.int64)
    for v in range(n_values):
        mask = codes == v
        sums[v] = powers @ mask
        counts[v] = mask.sum(axis=0)
    return sums, counts
