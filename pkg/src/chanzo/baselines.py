"""Comparison methods.

Upper bounds with full channel knowledge (pbf_perfect, po_grid on the true
channel), conventional estimate-then-optimize pipelines (least-squares for
the reflecting surface, orthogonal matching pursuit for the movable
antenna), and the blind samplers (random-max sampling, conditional sample
mean). All pilot-consuming methods talk to a PilotOracle; the bounds bypass
it at zero pilot cost.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .channels import CascadedChannel, PathSet, Position, RisPhases
from .errors import RankDeficientWarning

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class DiscretePhaseBook:
    """The 2^bits equispaced phase values {2*pi*k / 2^bits}."""

    bits: int = 2

    def __post_init__(self):
        if self.bits < 1:
            raise ValueError("bits must be >= 1")

    @property
    def n_values(self):
        return 1 << self.bits

    @property
    def values(self):
        return TWO_PI * np.arange(self.n_values) / self.n_values


@dataclass(frozen=True)
class AngleGrid:
    """Rectangular (elevation, azimuth) grid inducing a plane-wave
    dictionary. Grid point g = i_el * n_az + i_az covers elevation
    [-pi/2, pi/2] and azimuth [-pi, pi] inclusive."""

    n_el: int = 32
    n_az: int = 32

    def __post_init__(self):
        if self.n_el < 1 or self.n_az < 1:
            raise ValueError("grid must have at least one point per axis")

    @property
    def size(self):
        return self.n_el * self.n_az

    @property
    def elevations(self):
        return np.linspace(-np.pi / 2, np.pi / 2, self.n_el)

    @property
    def azimuths(self):
        return np.linspace(-np.pi, np.pi, self.n_az)

    @property
    def directions(self):
        """size x 2 matrix of direction vectors, elevation-major order."""
        el = np.repeat(self.elevations, self.n_az)
        az = np.tile(self.azimuths, self.n_el)
        return np.stack([np.sin(el) * np.cos(az), np.cos(el)], axis=1)

    def grid_angles(self, index):
        return self.elevations[index // self.n_az], self.azimuths[index % self.n_az]

    def dictionary(self, positions, wavelength):
        """N x size matrix A[n, g] = exp(j * 2*pi/wavelength * <p_n, u_g>)."""
        positions = np.asarray(positions, dtype=np.float64)
        phase = (TWO_PI / wavelength) * (positions @ self.directions.T)
        return np.exp(1j * phase)


def pbf_perfect(chan):
    """Optimal reflection phases under full channel knowledge:
    phi_m = arg(direct) - arg(coeffs_m), aligning every reflected term with
    the direct link so |h| = |direct| + sum_m |coeffs_m|. Zero pilot cost;
    the upper bound for every other method."""
    phases = np.mod(np.angle(chan.direct) - np.angle(chan.coeffs), TWO_PI)
    return RisPhases(phases)


def dft_probe_book(n_pilots, m):
    """N x M probe phases whose reflection vectors are discrete-Fourier
    rows (cycled modulo M), so any N <= M distinct rows are orthogonal."""
    if n_pilots < 1:
        raise ValueError("need at least one probe")
    rows = np.arange(n_pilots) % m
    return np.mod(-TWO_PI * np.outer(rows, np.arange(m)) / m, TWO_PI)


def ls_estimate_then_pbf(oracle, n_pilots, probe_book):
    """Estimate the cascaded gains by least squares from coherent probes,
    then apply pbf_perfect to the estimate.

    Measurement model: y_n = sqrt(P) * theta_n^T c + noise with
    theta_n = exp(j * probe_book[n]); the direct link (if any) is not part
    of the model. Minimum-norm solution when underdetermined. Consumes
    exactly n_pilots queries.
    """
    if n_pilots < 1:
        raise ValueError("need at least one pilot")
    probe_book = np.asarray(probe_book, dtype=np.float64)
    if probe_book.shape[0] != n_pilots:
        raise ValueError("probe_book must have n_pilots rows")
    if oracle.mode != "coherent":
        raise ValueError("least-squares estimation needs a COHERENT-mode oracle")
    y = oracle.query_many(probe_book)
    a_mat = np.exp(1j * probe_book)
    m = probe_book.shape[1]
    c_hat, _, rank, _ = np.linalg.lstsq(a_mat, y / np.sqrt(oracle.tx_power), rcond=None)
    if n_pilots >= m and rank < m:
        warnings.warn("rank-deficient probe matrix; minimum-norm pseudoinverse solution used",
                      RankDeficientWarning)
    return pbf_perfect(CascadedChannel(coeffs=c_hat, direct=0j))


def rms(oracle, n_samples, sampler):
    """Random-max sampling: draw n_samples configurations from `sampler`,
    measure each once, return the one with the highest measured value.
    sampler(n) must return an n-row configuration matrix."""
    if n_samples < 1:
        raise ValueError("need at least one sample")
    mat = np.asarray(sampler(n_samples), dtype=np.float64)
    if mat.shape[0] != n_samples:
        raise ValueError("sampler returned the wrong number of rows")
    vals = oracle.query_many(mat)
    kind = oracle.scenario_kind
    best = mat[int(np.argmax(np.abs(vals) if np.iscomplexobj(vals) else vals))]
    return RisPhases(best) if kind == "ris" else Position(best)


def ris_book_sampler(rng, book, m):
    """Sampler drawing each element's phase i.i.d. uniform from the book."""

    def sample(n):
        return book.values[rng.integers(0, book.n_values, size=(n, m))]

    return sample


def ma_region_sampler(rng, region):
    """Sampler drawing positions uniformly over [0, Lx] x [0, Ly]."""
    lx, ly = region

    def sample(n):
        out = rng.uniform(0.0, 1.0, size=(n, 2))
        out[:, 0] *= lx
        out[:, 1] *= ly
        return out

    return sample


def csm(oracle, n_samples, book, rng):
    """Conditional sample mean phase selection.

    Probes n_samples configurations with each element's phase i.i.d.
    uniform over the book, then per element picks the book value whose
    conditional mean measured power is largest. Ties and never-sampled
    values resolve toward the smaller value (empty cells count as mean 0).
    Consumes exactly n_samples queries.
    """
    if n_samples < 1:
        raise ValueError("need at least one sample")
    m = oracle.dim
    codes = rng.integers(0, book.n_values, size=(n_samples, m))
    powers = oracle.query_many(book.values[codes])
    sums, counts = kernels.csm_tally(np.asarray(powers, dtype=np.float64),
                                     codes.astype(np.int64), book.n_values)
    means = np.where(counts > 0, sums / np.maximum(counts, 1), 0.0)
    pick = np.argmax(means, axis=0)  # first max = smallest value on ties
    return RisPhases(book.values[pick])


def omp_estimate(positions, y, grid, wavelength, k_max, residual_tol=1e-3,
                 tx_power=1.0, noise_var=0.0):
    """Orthogonal matching pursuit over the angle-grid dictionary.

    Greedily selects the grid direction best correlated with the residual,
    re-solves least squares on the selected support, and stops when the
    residual norm falls under the tolerance (relative residual_tol, or a
    noise-floor threshold when noise_var > 0) or k_max atoms are chosen.
    Returns the recovered paths; an empty PathSet when y is indistinguishable
    from a zero channel.
    """
    if grid.size < 1:
        raise ValueError("empty grid")
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    y = np.asarray(y, dtype=np.complex128).reshape(-1)
    if positions.shape[0] != y.size:
        raise ValueError("positions and measurements must align")
    n = y.size
    b = y / np.sqrt(tx_power)
    bnorm = np.linalg.norm(b)
    thresh = residual_tol * bnorm
    if noise_var > 0.0:
        # noise-floor stop: |residual|^2 concentrates around n*sigma^2/P
        floor = np.sqrt(noise_var / tx_power) * np.sqrt(n + 3.0 * np.sqrt(2.0 * n))
        thresh = max(thresh, floor)
    empty = PathSet(gains=np.zeros(0, dtype=complex), elevations=np.zeros(0),
                    azimuths=np.zeros(0), wavelength=wavelength)
    if bnorm <= max(residual_tol, thresh):
        return empty
    a_full = grid.dictionary(positions, wavelength)
    resid = b.copy()
    support = []
    sol = np.zeros(0, dtype=complex)
    for _ in range(k_max):
        gidx = int(np.argmax(np.abs(a_full.conj().T @ resid)))
        # The (el, az) chart maps az and -az to one direction, so the grid
        # holds duplicate atoms; report the smallest equivalent index so the
        # selection is deterministic rather than decided by ulp-level noise.
        dup = np.max(np.abs(grid.directions - grid.directions[gidx]), axis=1) <= 1e-12
        gidx = int(np.argmax(dup))
        if gidx in support:
            break  # no further progress possible
        support.append(gidx)
        sol, *_ = np.linalg.lstsq(a_full[:, support], b, rcond=None)
        resid = b - a_full[:, support] @ sol
        if np.linalg.norm(resid) <= thresh:
            break
    if not support:
        return empty
    idx = np.asarray(support)
    return PathSet(gains=sol, elevations=grid.elevations[idx // grid.n_az],
                   azimuths=grid.azimuths[idx % grid.n_az], wavelength=wavelength)


def po_grid(channel_fn, region, coarse_step, refine_levels=3, vectorized=False):
    """Position optimization by exhaustive coarse grid search plus local
    refinement (each round shrinks the step 5x around the incumbent).

    channel_fn maps a length-2 position array to a complex gain (with
    vectorized=True: an (n, 2) array to n gains); it is evaluated on the
    grids directly (no pilot cost), so pass either the true channel or a
    reconstructed one. Returns the earliest grid point (lexicographic
    order) whose |gain|^2 is within 1 part in 1e12 of the maximum, which
    makes flat landscapes resolve deterministically.
    """
    if not coarse_step > 0:
        raise ValueError("coarse_step must be positive")
    lx, ly = region

    def grid_eval(xs, ys):
        pts = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1).reshape(-1, 2)
        if vectorized:
            vals = np.abs(np.asarray(channel_fn(pts))) ** 2
        else:
            vals = np.array([abs(channel_fn(p)) ** 2 for p in pts])
        vmax = vals.max()
        sel = int(np.argmax(vals >= vmax / (1.0 + 1e-12)))
        return pts[sel], vals[sel]

    xs = np.arange(0.0, lx + coarse_step / 2, coarse_step)
    ys = np.arange(0.0, ly + coarse_step / 2, coarse_step)
    best, _ = grid_eval(xs, ys)
    step = coarse_step
    for _ in range(refine_levels):
        step /= 5.0
        offs = np.arange(-5, 6) * step
        xs = np.clip(best[0] + offs, 0.0, lx)
        ys = np.clip(best[1] + offs, 0.0, ly)
        best, _ = grid_eval(xs, ys)
    return Position(best)
