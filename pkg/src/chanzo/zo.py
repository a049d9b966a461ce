"""Zeroth-order optimization: coordinate-wise finite-difference gradient
estimates from objective values only, plus a projected gradient-ascent loop.

The estimator perturbs one coordinate at a time: forward mode uses
(f(x + mu*e_i) - f(x)) / mu at |coords|+1 queries per block (the center
value is evaluated once and shared); central mode uses
(f(x + mu*e_i) - f(x - mu*e_i)) / (2*mu) at 2*|coords| queries and has
O(mu^2) bias instead of O(mu). The ascent loop touches the objective only
through an oracle's query() method, so it runs unchanged against a pilot
oracle or any plain test function wrapped in FunctionOracle.
"""

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceededError

FORWARD = "forward"
CENTRAL = "central"

TWO_PI = 2.0 * np.pi


class _PhaseWrap:
    def __repr__(self):
        return "PHASE_WRAP"


PHASE_WRAP = _PhaseWrap()


@dataclass(frozen=True)
class Box:
    """Axis-aligned box constraint [lo, hi]; scalar bounds apply to every
    coordinate, vector bounds per coordinate."""

    lo: object
    hi: object

    def __post_init__(self):
        if not np.all(np.asarray(self.lo) < np.asarray(self.hi)):
            raise ValueError("box needs lo < hi")


def project(x, constraint):
    """Map x onto the constraint set: PHASE_WRAP reduces each coordinate
    modulo 2*pi into [0, 2*pi); Box clamps into [lo, hi]; None leaves x
    unconstrained."""
    x = np.asarray(x, dtype=np.float64)
    if constraint is None:
        return x
    if constraint is PHASE_WRAP:
        return np.mod(x, TWO_PI)
    if isinstance(constraint, Box):
        return np.clip(x, constraint.lo, constraint.hi)
    raise TypeError(f"unknown constraint {constraint!r}")


@dataclass
class ZoParams:
    """Hyperparameters for run_zo.

    mu: smoothing radius (radians for phases, meters for positions).
    eta: the single step size.
    block_size: coordinates perturbed per iteration; None picks
        max(1, d // 16) from the variable dimension at run time.
    max_queries: query budget share for this run (None = all the oracle has).
    seed: coordinate-block sampling seed.
    gradient_mode: FORWARD or CENTRAL.
    block_scheme: "random" draws a fresh uniform block without replacement
        each iteration; "cycle" walks a random permutation so all
        coordinates are visited before any repeats.
    value_transform: optional monotone transform of the objective value used
        inside the gradient estimate ("sqrt" tames the spread of
        per-coordinate curvatures of a squared-magnitude objective).
    """

    mu: float = 1e-3
    eta: float = 0.5
    block_size: int | None = None
    max_queries: int | None = None
    seed: int = 0
    gradient_mode: str = FORWARD
    block_scheme: str = "random"
    value_transform: str | None = None

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError("mu must be positive")
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if self.block_size is not None and self.block_size < 1:
            raise ValueError("block_size must be >= 1 (or None for the d//16 rule)")
        if self.gradient_mode not in (FORWARD, CENTRAL):
            raise ValueError(f"gradient_mode must be {FORWARD!r} or {CENTRAL!r}")
        if self.block_scheme not in ("random", "cycle"):
            raise ValueError("block_scheme must be 'random' or 'cycle'")
        if self.value_transform not in (None, "sqrt"):
            raise ValueError("value_transform must be None or 'sqrt'")

    def resolve_block_size(self, dim):
        """Concrete block size for a dim-dimensional variable."""
        b = self.block_size if self.block_size is not None else max(1, dim // 16)
        if b > dim:
            raise ValueError(f"block_size {b} exceeds variable dimension {dim}")
        return b

    def queries_per_iteration(self, dim=None):
        b = self.block_size if dim is None else self.resolve_block_size(dim)
        if b is None:
            raise ValueError("block_size is unset; pass dim to resolve the default")
        return b + 1 if self.gradient_mode == FORWARD else 2 * b


@dataclass
class TrajectoryPoint:
    iteration: int
    variable: np.ndarray
    best_value: float
    queries_used: int


@dataclass
class Trajectory:
    """Per-iteration record of a run_zo execution: the iterate after each
    update, the best objective value observed so far, and the cumulative
    query count. best_value is non-decreasing by construction."""

    points: list = field(default_factory=list)

    def __len__(self):
        return len(self.points)

    def append(self, iteration, variable, best_value, queries_used):
        self.points.append(TrajectoryPoint(iteration, np.array(variable, copy=True),
                                           best_value, queries_used))

    def final_variable(self):
        return self.points[-1].variable if self.points else None

    def best_values(self):
        return np.array([p.best_value for p in self.points])

    def to_csv(self, fh):
        fh.write("iter,queries_used,best_power\n")
        for p in self.points:
            fh.write(f"{p.iteration},{p.queries_used},{float(p.best_value)!r}\n")

    def to_csv_string(self):
        buf = io.StringIO()
        self.to_csv(buf)
        return buf.getvalue()


class FunctionOracle:
    """Adapter giving a plain callable the oracle query interface, with the
    same budget accounting. Handy for tests and non-channel objectives."""

    def __init__(self, fn, budget=None):
        self.fn = fn
        self.budget = None if budget is None else int(budget)
        self.used = 0

    @property
    def remaining(self):
        return None if self.budget is None else self.budget - self.used

    def query(self, x):
        if self.budget is not None and self.used + 1 > self.budget:
            raise BudgetExceededError(f"budget exhausted: {self.used} of {self.budget} used")
        self.used += 1
        return float(self.fn(np.asarray(x, dtype=np.float64)))


def _transform(value, name):
    if name is None:
        return value
    return math.sqrt(value) if value > 0.0 else 0.0


def zo_gradient(oracle, x, mu, coords, gradient_mode=FORWARD, value_transform=None,
                observer=None):
    """Finite-difference gradient estimate over a coordinate subset.

    Returns a dense vector that is zero outside `coords`. Forward mode
    spends |coords|+1 queries (one shared center evaluation), central mode
    2*|coords|. On budget exhaustion raises BudgetExceededError with the
    partially filled gradient attached. `observer(x, value)` is invoked for
    every query, letting callers track the best configuration seen.
    """
    if not mu > 0:
        raise ValueError("mu must be positive")
    x = np.asarray(x, dtype=np.float64)
    coords = np.asarray(coords, dtype=np.intp)
    g = np.zeros_like(x)

    def q(pt):
        val = oracle.query(pt)
        if observer is not None:
            observer(pt, val)
        return val

    try:
        if gradient_mode == FORWARD:
            f0 = _transform(q(x), value_transform)
            for i in coords:
                xp = x.copy()
                xp[i] += mu
                g[i] = (_transform(q(xp), value_transform) - f0) / mu
        elif gradient_mode == CENTRAL:
            for i in coords:
                xp = x.copy()
                xp[i] += mu
                xm = x.copy()
                xm[i] -= mu
                fp = _transform(q(xp), value_transform)
                fm = _transform(q(xm), value_transform)
                g[i] = (fp - fm) / (2.0 * mu)
        else:
            raise ValueError(f"gradient_mode must be {FORWARD!r} or {CENTRAL!r}")
    except BudgetExceededError as exc:
        exc.partial = g
        raise
    return g


def run_zo(oracle, x0, params, constraint):
    """Projected gradient ascent driven by zo_gradient.

    Each iteration draws a coordinate block of size b, estimates the
    gradient there, takes the step x <- project(x + eta * g), and records
    the iterate. Stops when the remaining budget cannot pay for another
    block (forward mode: b+1 queries, so a budget of N yields exactly
    floor(N/(b+1)) iterations). Returns (best queried variable, trajectory);
    with noisy measurements "best" is by measured value, restricted to
    queried points that already satisfy the constraint (probe points can
    step up to mu outside it), and the trajectory holds the final iterate
    for callers that prefer to deploy it.
    """
    x = project(np.asarray(x0, dtype=np.float64), constraint)
    d = x.size
    b = params.resolve_block_size(d)
    cost = params.queries_per_iteration(d)
    rng = np.random.default_rng(params.seed)
    traj = Trajectory()

    start_used = oracle.used
    best = {"x": x.copy(), "val": -np.inf}

    def observer(pt, val):
        if val > best["val"]:
            p = np.array(pt, dtype=np.float64, copy=True)
            if np.array_equal(project(p, constraint), p):
                best["val"] = val
                best["x"] = p

    def budget_left():
        left = None if params.max_queries is None else params.max_queries - (oracle.used - start_used)
        rem = oracle.remaining
        if rem is not None:
            left = rem if left is None else min(left, rem)
        return left

    if budget_left() is None:
        raise ValueError("run_zo needs a finite budget: set params.max_queries or use a budgeted oracle")

    perm = rng.permutation(d)
    pos = d  # force a reshuffle on first use
    it = 0
    while True:
        left = budget_left()
        if left < cost:
            break
        if params.block_scheme == "cycle":
            if pos + b > d:
                perm = rng.permutation(d)
                pos = 0
            coords = perm[pos:pos + b]
            pos += b
        else:
            coords = rng.choice(d, size=b, replace=False)
        g = zo_gradient(oracle, x, params.mu, coords,
                        gradient_mode=params.gradient_mode,
                        value_transform=params.value_transform,
                        observer=observer)
        x = project(x + params.eta * g, constraint)
        it += 1
        traj.append(it, x, best["val"], oracle.used - start_used)
    return best["x"], traj


def quantize_phases(phases, bits):
    """Snap phases to the 2^bits-point grid {2*pi*k / 2^bits}.

    Wrapping is circular (a phase just below 2*pi is nearest to grid point
    0) and exact midpoints go to the smaller k, with the wrap-around
    midpoint between the last grid point and 0 going to 0. Idempotent.
    """
    if bits < 1:
        raise ValueError("bits must be >= 1")
    from .channels import RisPhases  # local import to avoid a cycle

    wrap = isinstance(phases, RisPhases)
    x = phases.phases if wrap else np.asarray(phases, dtype=np.float64)
    n = 1 << bits
    t = np.mod(x, TWO_PI) * (n / TWO_PI)
    k_lo = np.floor(t)
    frac = t - k_lo
    k = np.where(frac > 0.5, k_lo + 1.0, k_lo)
    tie = frac == 0.5
    if np.any(tie):
        k_hi = np.mod(k_lo + 1.0, n)
        k = np.where(tie, np.minimum(k_lo, k_hi), k)
    out = np.mod(k, n) * (TWO_PI / n)
    return RisPhases(out) if wrap else out
