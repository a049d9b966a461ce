"""Black-box pilot measurement front-end.

Optimizers and baselines never see the propagation state directly: they hand
a candidate configuration to a PilotOracle and get back either a received
power (POWER mode) or a complex baseband sample (COHERENT mode, used by the
linear estimators). Every measurement costs one unit of pilot budget and is
logged, so methods can be compared at equal training cost. SNR reporting
(`snr_of`) models the data-transmission stage and is deliberately exempt
from both the budget and the log.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .channels import CascadedChannel, PathSet, Position, RisPhases
from .errors import BudgetExceededError
from .zo import quantize_phases

POWER = "power"
COHERENT = "coherent"


@dataclass
class LedgerRow:
    query_index: int
    scenario: str
    variable: np.ndarray
    value: complex | None  # None in POWER mode
    power: float


@dataclass
class QueryLedger:
    """Ordered log of every pilot query an oracle has answered."""

    rows: list = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    def append(self, row):
        self.rows.append(row)

    def powers(self):
        return np.array([r.power for r in self.rows])

    def to_csv(self, path_or_file):
        """Write rows as CSV with columns query_index, scenario, variable,
        value_re, value_im, value_power. variable is the flattened
        configuration as comma-separated reals; value_re/value_im are empty
        for POWER-mode rows."""
        own = isinstance(path_or_file, (str, bytes))
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh)
            w.writerow(["query_index", "scenario", "variable", "value_re", "value_im", "value_power"])
            for r in self.rows:
                var = ",".join(repr(float(v)) for v in r.variable)
                if r.value is None:
                    re_s, im_s = "", ""
                else:
                    re_s, im_s = repr(float(r.value.real)), repr(float(r.value.imag))
                w.writerow([r.query_index, r.scenario, var, re_s, im_s, repr(float(r.power))])
        finally:
            if own:
                fh.close()

    def to_csv_string(self):
        buf = io.StringIO()
        self.to_csv(buf)
        return buf.getvalue()

    def replay(self, oracle):
        """Re-issue every logged query against `oracle` and check the
        returned values match bit-exactly. Intended for a freshly cloned
        oracle (same scenario, same noise seed)."""
        for r in self.rows:
            got = oracle.query(r.variable)
            if r.value is None:
                if got != r.power:
                    return False
            elif got != r.value:
                return False
        return True


class PilotOracle:
    """Budgeted measurement access to one scenario.

    Parameters
    ----------
    scenario : CascadedChannel or PathSet
    tx_power : transmit power P (linear watts)
    noise_var : per-pilot complex noise variance (linear watts)
    budget : max query count, or None for unlimited
    mode : POWER (returns |y|^2) or COHERENT (returns y)
    quantizer_bits : if set, RIS phase queries are snapped to the
        2^bits-point grid before evaluation
    avg_len : pilots averaged per query() call; each averaged pilot costs
        one budget unit and gets its own ledger row
    noise_seed : seed for the pilot-noise stream
    keep_ledger : disable only for throughput benchmarks
    """

    def __init__(self, scenario, tx_power=1.0, noise_var=0.0, budget=None,
                 mode=POWER, quantizer_bits=None, avg_len=1, noise_seed=0,
                 keep_ledger=True):
        if isinstance(scenario, CascadedChannel):
            self._kind = "ris"
        elif isinstance(scenario, PathSet):
            self._kind = "ma"
        else:
            raise TypeError("scenario must be a CascadedChannel or a PathSet")
        if not tx_power >= 0:
            raise ValueError("tx_power must be >= 0 (0 measures noise alone)")
        if noise_var < 0:
            raise ValueError("noise_var must be >= 0")
        if mode not in (POWER, COHERENT):
            raise ValueError(f"mode must be {POWER!r} or {COHERENT!r}")
        if avg_len < 1:
            raise ValueError("avg_len must be >= 1")
        self._scenario = scenario
        self.tx_power = float(tx_power)
        self.noise_var = float(noise_var)
        self.budget = None if budget is None else int(budget)
        self.mode = mode
        self.quantizer_bits = quantizer_bits
        self.avg_len = int(avg_len)
        self.noise_seed = noise_seed
        self.used = 0
        self.ledger = QueryLedger() if keep_ledger else None
        self._rng = np.random.default_rng(noise_seed)

    @property
    def scenario_kind(self):
        return self._kind

    @property
    def dim(self):
        """Dimension of the flattened tunable variable."""
        return self._scenario.m if self._kind == "ris" else 2

    @property
    def remaining(self):
        return None if self.budget is None else self.budget - self.used

    def clone(self, **overrides):
        """Fresh oracle on the same scenario with zero queries used. The
        noise stream restarts from noise_seed, so a clone replays queries
        bit-exactly."""
        kw = dict(tx_power=self.tx_power, noise_var=self.noise_var,
                  budget=self.budget, mode=self.mode,
                  quantizer_bits=self.quantizer_bits, avg_len=self.avg_len,
                  noise_seed=self.noise_seed,
                  keep_ledger=self.ledger is not None)
        kw.update(overrides)
        return PilotOracle(self._scenario, **kw)

    def _flatten(self, a):
        if self._kind == "ris":
            if isinstance(a, RisPhases):
                x = a.phases
            else:
                x = np.asarray(a, dtype=np.float64)
            if x.ndim != 1 or x.size != self._scenario.m:
                raise ValueError(f"expected {self._scenario.m} phases, got shape {np.shape(x)}")
            if self.quantizer_bits is not None:
                x = quantize_phases(x, self.quantizer_bits)
            return x
        if isinstance(a, Position):
            x = a.xy
        else:
            x = np.asarray(a, dtype=np.float64).reshape(-1)
        if x.size != 2:
            raise ValueError(f"expected a 2-D position, got shape {np.shape(x)}")
        return x

    def _gain(self, x):
        if self._kind == "ris":
            return kernels.ris_response(self._scenario.coeffs, x, self._scenario.direct)
        if self._scenario.k == 0:
            return 0j
        return kernels.ma_response(self._scenario.gains, self._scenario.directions,
                                   self._scenario.wavelength, x)

    def _charge(self, n):
        if self.budget is not None and self.used + n > self.budget:
            raise BudgetExceededError(
                f"pilot budget exhausted: {self.used} used of {self.budget}, need {n} more")
        self.used += n

    def _noise(self):
        if self.noise_var == 0.0:
            return 0j
        z = self._rng.standard_normal(2)
        return complex(z[0], z[1]) * np.sqrt(self.noise_var / 2.0)

    def query(self, a):
        """One objective evaluation. Returns |y|^2 in POWER mode or y in
        COHERENT mode, where y = sqrt(P)*H(a) + noise, averaged over avg_len
        pilots. Consumes avg_len budget units."""
        x = self._flatten(a)
        self._charge(self.avg_len)
        amp = np.sqrt(self.tx_power) * self._gain(x)
        acc = 0.0 if self.mode == POWER else 0j
        for _ in range(self.avg_len):
            y = amp + self._noise()
            # re^2 + im^2 rather than abs()**2: plain IEEE multiply-adds give
            # bit-identical results between scalar and vectorized paths
            p = y.real * y.real + y.imag * y.imag
            acc += p if self.mode == POWER else y
            if self.ledger is not None:
                self.ledger.append(LedgerRow(
                    query_index=len(self.ledger), scenario=self._kind,
                    variable=np.array(x, copy=True),
                    value=None if self.mode == POWER else y,
                    power=p))
        return acc / self.avg_len

    def query_many(self, mat):
        """Query one configuration per row of `mat`. Semantically identical
        to calling query() row by row (same budget, ledger and noise-stream
        behaviour); vectorized when avg_len == 1."""
        mat = np.asarray(mat, dtype=np.float64)
        if mat.ndim != 2:
            raise ValueError("query_many expects a 2-D array of row configurations")
        if self.avg_len != 1:
            out = [self.query(row) for row in mat]
            return np.asarray(out)
        rows = np.stack([self._flatten(r) for r in mat]) if len(mat) else mat
        self._charge(len(rows))
        if self._kind == "ris":
            gains = kernels.ris_response_batch(self._scenario.coeffs, rows, self._scenario.direct)
        elif self._scenario.k == 0:
            gains = np.zeros(len(rows), dtype=np.complex128)
        else:
            gains = kernels.ma_response_batch(self._scenario.gains, self._scenario.directions,
                                              self._scenario.wavelength, rows)
        y = np.sqrt(self.tx_power) * gains
        if self.noise_var > 0.0:
            z = self._rng.standard_normal((len(rows), 2))
            y = y + (z[:, 0] + 1j * z[:, 1]) * np.sqrt(self.noise_var / 2.0)
        powers = y.real * y.real + y.imag * y.imag
        if self.ledger is not None:
            base = len(self.ledger)
            for i in range(len(rows)):
                self.ledger.append(LedgerRow(
                    query_index=base + i, scenario=self._kind,
                    variable=np.array(rows[i], copy=True),
                    value=None if self.mode == POWER else complex(y[i]),
                    power=float(powers[i])))
        return powers if self.mode == POWER else y


def true_power(oracle, a):
    """Noiseless received power P*|H(a)|^2 at a configuration. Models the
    data-transmission stage: costs no pilot budget and is never logged."""
    x = oracle._flatten(a)
    g = oracle._gain(x)
    # same re^2 + im^2 form as query() so noiseless queries match bit-exactly
    return oracle.tx_power * (g.real * g.real + g.imag * g.imag)


def snr_of(oracle, a, noise_var=None):
    """Deployment SNR in dB at a configuration: P*|H(a)|^2 / noise_var.

    noise_var defaults to the oracle's pilot noise variance; pass an explicit
    reporting variance to decouple the two. Ledger- and budget-exempt."""
    nv = oracle.noise_var if noise_var is None else float(noise_var)
    if not nv > 0:
        raise ValueError("snr_of needs a positive noise variance for a finite SNR")
    p = true_power(oracle, a)
    if p == 0.0:
        return -np.inf
    return 10.0 * np.log10(p / nv)
