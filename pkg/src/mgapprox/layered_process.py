"""Layered rare-spike process with two competing martingale approximants.

The construction stacks independent levels k = 1..K.  Level k contributes
p_k (rho_k E_k - (1 + rho_k) D_k) to the time-zero value, where E_k takes
+-q_k with probability 1/(2 q_k^2) each (zero otherwise, unit variance) and
D_k is an independent copy of E_k observed phi(k) steps in the past.  Two
candidate martingale parts are compared through exact window-sum norms:

* subtracting the lagged parts (the D side) leaves every normalized window
  residual below 1;
* subtracting the synchronous parts (the E side) leaves normalized window
  residuals above the floor b_n at the horizons n = phi(j).

The spike magnitudes q_k grow by a factor of about 30 k sqrt(8 phi(k)) per
level, so the summed value determines every level outcome: at each level
the nine possible (E, D) sign pairs shift the value into nine disjoint
intervals of half-width r_{k-1}.  Magnitudes overflow binary64 near level
40; q, r, s are therefore kept as natural logs, and the encoder/decoder
runs in arbitrary precision sized to the dynamic range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Callable

import mpmath
import numpy as np
from scipy.special import polygamma

from .errors import InvariantViolation
from .rng import substream

__all__ = [
    "DecodeReport",
    "DecodedSample",
    "DecodingTable",
    "FIRE_LOG_FLOOR",
    "LayerCodec",
    "LayerParams",
    "TableCell",
    "decoding_table",
    "inv_sqrt_log_rule",
    "level_one_window_variance",
    "power_rule",
    "residual_norm_sq_lagged",
    "residual_norm_sq_natural",
    "simulate_and_decode",
    "simulate_level_one_variance",
    "synthesize_layer_params",
]

# Per-draw natural-log probability below which a level cannot fire within
# any feasible sample budget; such levels are skipped and the skipped mass
# is reported.
FIRE_LOG_FLOOR = -40.0

DEFAULT_SEARCH_CAP = 10**6


def inv_sqrt_log_rule() -> Callable[[int], float]:
    """Floor sequence b_n = 1/sqrt(log(n+3)): positive, decreasing, -> 0."""
    return lambda n: 1.0 / math.sqrt(math.log(n + 3))


def power_rule(beta: float) -> Callable[[int], float]:
    """Floor sequence b_n = n^-beta for beta > 0."""
    beta = float(beta)
    if not beta > 0.0:
        raise ValueError("beta must be positive")
    return lambda n: float(n) ** -beta


def _tail_inverse_squares(j: int) -> float:
    # sum_{k > j} 1/k^2, analytically (trigamma at j+1)
    return float(polygamma(1, j + 1))


@dataclass(frozen=True, eq=False)
class LayerParams:
    """Synthesized constants of the layered construction.

    q, r, s are natural logs (``log_q``, ``log_r``, ``log_s``).  ``log_s[l-1]``
    is the level-l scale log(p_l q_l); for l >= 2 it equals
    log(10 r_{l-1} / rho_l), while level 1 has no predecessor, so its scale
    is p_1 q_1 = 1 directly.  ``b_at_phi`` records the floor sequence at the
    synthesized horizons, ``a_norm`` the (unit) innovation normalization.
    """

    level_count: int
    p: np.ndarray
    rho: np.ndarray
    phi: np.ndarray
    log_q: np.ndarray
    log_r: np.ndarray
    log_s: np.ndarray
    b_at_phi: np.ndarray
    a_norm: float = 1.0

    def __post_init__(self):
        for name in ("p", "rho", "phi", "log_q", "log_r", "log_s", "b_at_phi"):
            arr = np.asarray(getattr(self, name))
            if arr.shape != (self.level_count,):
                raise ValueError(f"{name} must have one entry per level")
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def _smallest_horizon(
    b_rule: Callable[[int], float], target: float, start: int, cap: int
) -> int:
    """Smallest m >= start with b(m)^2 < target; b is non-increasing, so the
    predicate is monotone and an exponential probe plus bisection works."""

    def ok(m: int) -> bool:
        bm = float(b_rule(m))
        if not bm > 0.0:
            raise ValueError("the floor sequence must stay strictly positive")
        return bm * bm < target

    if ok(start):
        return start
    if start >= cap:
        raise ValueError(f"no admissible horizon at or below the search cap {cap}")
    lo = start
    hi = None
    step = 1
    m = start
    while hi is None:
        m = min(cap, m + step)
        step *= 2
        if ok(m):
            hi = m
        elif m >= cap:
            raise ValueError(
                f"no admissible horizon at or below the search cap {cap}; "
                "the floor sequence decays too slowly"
            )
        else:
            lo = m
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def synthesize_layer_params(
    b_rule: Callable[[int], float],
    level_count: int,
    search_cap: int = DEFAULT_SEARCH_CAP,
) -> LayerParams:
    """Choose phi, rho and q for a floor sequence b and K levels.

    phi(j) is the smallest integer above phi(j-1) (phi(0) = 12, which forces
    rho < 1/10) with 2 sum_{k>j} p_k^2 > b(phi(j))^2, the tail over all k > j
    taken analytically.  rho_k^2 = 1/(8 phi(k)).  q_1 = 1 and the recursion
    rho_{n+1} p_{n+1} q_{n+1} = 30 sum_{k<=n} p_k q_k runs in log space.
    """
    level_count = int(level_count)
    if level_count < 2:
        raise ValueError("need at least two levels")
    search_cap = int(search_cap)

    p = 1.0 / np.arange(1.0, level_count + 1.0)
    phi = np.empty(level_count, dtype=np.int64)
    prev = 12
    for j in range(1, level_count + 1):
        target = 2.0 * _tail_inverse_squares(j)
        prev = _smallest_horizon(b_rule, target, prev + 1, search_cap)
        phi[j - 1] = prev
    rho = 1.0 / np.sqrt(8.0 * phi.astype(float))

    log_p = -np.log(np.arange(1.0, level_count + 1.0))
    log_q = np.zeros(level_count)
    log_s = np.zeros(level_count)  # log_s[0] = log(p_1 q_1) = 0
    log_r = np.empty(level_count)
    cum = 0.0  # log sum_{k<=1} p_k q_k
    log_r[0] = math.log(3.0)
    for lvl in range(2, level_count + 1):
        lq = math.log(30.0) + cum - math.log(rho[lvl - 1]) - log_p[lvl - 1]
        log_q[lvl - 1] = lq
        ls = log_p[lvl - 1] + lq
        log_s[lvl - 1] = ls
        cum = float(np.logaddexp(cum, ls))
        log_r[lvl - 1] = math.log(3.0) + cum

    params = LayerParams(
        level_count=level_count,
        p=p,
        rho=rho,
        phi=phi,
        log_q=log_q,
        log_r=log_r,
        log_s=log_s,
        b_at_phi=np.array([float(b_rule(int(m))) for m in phi]),
    )
    _check_params(params)
    return params


def _check_params(params: LayerParams) -> None:
    k = params.level_count
    if not np.all(params.rho < 0.1):
        raise InvariantViolation("some rho reached 1/10")
    if not np.all(np.abs(8.0 * params.phi * params.rho**2 - 1.0) < 1e-12):
        raise InvariantViolation("rho^2 != 1/(8 phi)")
    if params.phi[0] < 13 or np.any(np.diff(params.phi) <= 0):
        raise InvariantViolation("phi must increase strictly from at least 13")
    for j in range(1, k + 1):
        if not 2.0 * _tail_inverse_squares(j) > params.b_at_phi[j - 1] ** 2:
            raise InvariantViolation(f"tail condition fails at level {j}")
    # q recursion, replayed in log space
    cum = 0.0
    for lvl in range(2, k + 1):
        lhs = (
            math.log(params.rho[lvl - 1])
            + math.log(params.p[lvl - 1])
            + params.log_q[lvl - 1]
        )
        rhs = math.log(30.0) + cum
        if abs(lhs - rhs) > 1e-12 * max(1.0, abs(lhs)):
            raise InvariantViolation(f"q recursion broken at level {lvl}")
        cum = float(np.logaddexp(cum, math.log(params.p[lvl - 1]) + params.log_q[lvl - 1]))
        # s_{lvl} = 10 r_{lvl-1} / rho_lvl > 100 r_{lvl-1}
        gap = params.log_s[lvl - 1] - params.log_r[lvl - 2]
        if not gap > math.log(100.0):
            raise InvariantViolation(f"scale separation s > 100 r fails at level {lvl}")
    if params.log_q[0] != 0.0:
        raise InvariantViolation("q_1 != 1")


def residual_norm_sq_lagged(params: LayerParams, n: int) -> float:
    """||window_n(process - lagged martingale part)||^2, which the
    construction keeps at or below n for every horizon (so the normalized
    residual gap stays bounded and in fact below 1).

    Levels with phi(k) <= n contribute 2 p^2 rho^2 phi(k); later stored
    levels contribute 2 n p^2 rho^2.  An unsynthesized level k > K would
    contribute 2 p_k^2 rho_k^2 min(phi(k), n) = p_k^2 min(phi(k), n)/(4 phi(k)),
    at most p_k^2/4 whatever phi(k) > phi(K) turns out to be, and at most
    p_k^2 n / (4 phi(K)) when n <= phi(K); the returned value adds that worst
    case, so it upper-bounds every admissible continuation.
    """
    n = int(n)
    if n < 1:
        raise ValueError("the horizon must be >= 1")
    phi = params.phi.astype(float)
    base = 2.0 * params.p**2 * params.rho**2
    served = phi <= n
    value = float(np.sum(base[served] * phi[served])) + float(n * np.sum(base[~served]))
    tail_cap = 0.25 * _tail_inverse_squares(params.level_count)
    return value + tail_cap * min(1.0, n / float(params.phi[-1]))


def residual_norm_sq_natural(params: LayerParams, n: int) -> float:
    """Certified lower bound on ||window_n(process - synchronous martingale
    part)||^2 under any admissible continuation beyond the stored levels.

    Stored levels enter exactly, with weights (1 + rho)^2.  A level k > K
    contributes at least 2 p_k^2 min(n, phi(K)): if its phi(k) exceeds n the
    term is 2 n p_k^2 (1+rho)^2 >= 2 n p_k^2, otherwise it is
    2 p_k^2 (1+rho)^2 phi(k) >= 2 p_k^2 phi(K).  At n = phi(j) the returned
    value therefore dominates 2 n sum_{k>j} p_k^2 > n b_n^2, the floor the
    synthesis guarantees.
    """
    n = int(n)
    if n < 1:
        raise ValueError("the horizon must be >= 1")
    phi = params.phi.astype(float)
    base = 2.0 * params.p**2 * (1.0 + params.rho) ** 2
    served = phi <= n
    value = float(np.sum(base[served] * phi[served])) + float(n * np.sum(base[~served]))
    tail_floor = 2.0 * min(n, int(params.phi[-1])) * _tail_inverse_squares(params.level_count)
    return value + tail_floor


# ---------------------------------------------------------------------------
# decoding tables

_OUTCOMES = tuple(product((-1, 0, 1), repeat=2))  # lexicographic (sx, sy)


@dataclass(frozen=True)
class TableCell:
    """One decoding interval: outcome (sign of E, sign of D) in units of q,
    and the interval center as sign * exp(log_abs)."""

    outcome: tuple[int, int]
    sign: int
    log_abs: float
    value: float


@dataclass(frozen=True, eq=False)
class DecodingTable:
    """Nine-interval partition at one level; intervals are
    (center - half_width, center + half_width), pairwise disjoint."""

    level: int
    cells: tuple[TableCell, ...]
    half_width: float
    log_half_width: float


def _cell_sign_log(rho: float, log_s: float, sx: int, sy: int) -> tuple[int, float]:
    # sign and log|.| of s (rho sx - (1 + rho) sy)
    if sy == 0:
        if sx == 0:
            return 0, -math.inf
        return sx, math.log(rho) + log_s
    if sy == -1:
        return 1, log_s + math.log1p(rho * (1.0 + sx))
    return -1, log_s + math.log1p(rho * (1.0 - sx))


def _slog_key(sign: int, log_abs: float):
    # sort key for sign * exp(log_abs)
    return (sign, 0.0) if sign == 0 else (sign, sign * log_abs)


def _slog_gap_log(s1: int, l1: float, s2: int, l2: float) -> float:
    # log(v2 - v1) for v1 < v2 given as (sign, log|.|)
    if s1 == 0:
        return l2
    if s2 == 0:
        return l1
    if s1 < 0 and s2 > 0:
        return float(np.logaddexp(l1, l2))
    if s1 > 0:  # both positive, so l2 > l1
        return l2 + math.log1p(-math.exp(l1 - l2))
    return l1 + math.log1p(-math.exp(l2 - l1))  # both negative, |v1| > |v2|


def decoding_table(params: LayerParams, level: int) -> DecodingTable:
    """Interval table used to read the level-``level`` outcome off a value.

    Centers are s_l (rho sx - (1 + rho) sy) over the nine sign pairs; the
    half-width is r_{l-1}, the reach of all lower levels combined.  Level 1
    has half-width zero (no lower levels): its table degenerates to nine
    isolated points, and decoding matches the nearest center instead of an
    interval.  Construction cross-checks each center against the
    s/r composition (e.g. s + 20 r = s (1 + 2 rho)) and verifies pairwise
    disjointness in the sign/log representation, raising InvariantViolation
    on any failure.
    """
    level = int(level)
    if not 1 <= level <= params.level_count:
        raise ValueError(f"level must lie in [1, {params.level_count}]")
    rho = float(params.rho[level - 1])
    log_s = float(params.log_s[level - 1])
    if level >= 2:
        log_r_prev = float(params.log_r[level - 2])
        if not log_s - log_r_prev > math.log(100.0):
            raise InvariantViolation(f"scale separation fails at level {level}")
    else:
        log_r_prev = -math.inf

    cells = []
    for sx, sy in _OUTCOMES:
        sign, log_abs = _cell_sign_log(rho, log_s, sx, sy)
        try:
            value = sign * math.exp(log_abs) if sign else 0.0
        except OverflowError:
            value = sign * math.inf
        cells.append(TableCell(outcome=(sx, sy), sign=sign, log_abs=log_abs, value=value))

    if level >= 2:
        # each center must also equal its s/r composition: the sy = 0 column
        # is +-10 r, and the |sy| = 1 columns are -sy (s + (1 + sx sy) 10 r)
        for cell in cells:
            sx, sy = cell.outcome
            if sy == 0 and sx != 0:
                alt = math.log(10.0) + log_r_prev
            elif sy != 0:
                shift = (1 + sx * (-sy)) * 10.0
                if shift == 0.0:
                    alt = log_s
                else:
                    alt = float(np.logaddexp(log_s, math.log(shift) + log_r_prev))
            else:
                continue
            if abs(alt - cell.log_abs) > 1e-12 * max(1.0, abs(alt)):
                raise InvariantViolation(
                    f"center composition mismatch at level {level}, outcome {cell.outcome}"
                )

    ordered = sorted(cells, key=lambda cell: _slog_key(cell.sign, cell.log_abs))
    log_width = math.log(2.0) + log_r_prev  # full interval width, log
    for lowc, highc in zip(ordered, ordered[1:]):
        gap = _slog_gap_log(lowc.sign, lowc.log_abs, highc.sign, highc.log_abs)
        if not (gap > -math.inf and (level == 1 or gap >= log_width - 1e-12)):
            raise InvariantViolation(
                f"intervals overlap at level {level}: outcomes {lowc.outcome}, {highc.outcome}"
            )

    half = math.exp(log_r_prev) if level >= 2 else 0.0
    return DecodingTable(
        level=level, cells=tuple(cells), half_width=half, log_half_width=log_r_prev
    )


# ---------------------------------------------------------------------------
# arbitrary-precision encode/decode

@dataclass(frozen=True)
class DecodedSample:
    """Decoder verdict: recovered sign vectors, or the level where the value
    sat exactly on an interval endpoint (boundary) or matched nothing."""

    x_signs: tuple[int, ...]
    y_signs: tuple[int, ...]
    ok: bool
    boundary: bool = False
    fail_level: int | None = None


class LayerCodec:
    """Arbitrary-precision encoder/decoder for level outcomes.

    Working precision is sized to the construction's dynamic range plus
    guard digits, and every scale constant is rebuilt from (p, rho, phi) at
    that precision, so the cascading subtractions keep a wide margin
    relative to each level's half-width.  A value is decodable in plain
    binary64 only when all levels above the binary64 range are silent; this
    codec removes that restriction.
    """

    def __init__(self, params: LayerParams, guard_digits: int = 30):
        self.params = params
        span = float(params.log_s[-1]) - min(0.0, math.log(float(params.rho[0])))
        self.dps = guard_digits + int(span / math.log(10.0)) + 1
        k = params.level_count
        with mpmath.workdps(self.dps):
            rho = [1 / mpmath.sqrt(8 * int(m)) for m in params.phi]
            p = [mpmath.mpf(1) / i for i in range(1, k + 1)]
            q = [mpmath.mpf(1)]
            for lvl in range(2, k + 1):
                total = mpmath.fsum(p[i] * q[i] for i in range(lvl - 1))
                q.append(30 * total / (rho[lvl - 1] * p[lvl - 1]))
            scale = [p[i] * q[i] for i in range(k)]
            reach = [3 * mpmath.fsum(p[i] * q[i] for i in range(lvl)) for lvl in range(1, k + 1)]
            centers = []
            for lvl in range(1, k + 1):
                cells = [
                    ((sx, sy), scale[lvl - 1] * (rho[lvl - 1] * sx - (1 + rho[lvl - 1]) * sy))
                    for sx, sy in _OUTCOMES
                ]
                # the silent outcome decodes most samples; test it first
                cells.sort(key=lambda cell: cell[0] != (0, 0))
                centers.append(cells)
            self._rho = rho
            self._reach = reach
            self._centers = centers

    def encode(self, x_signs, y_signs) -> mpmath.mpf:
        """Exact value of the time-zero sum for explicit level outcomes."""
        k = self.params.level_count
        x_signs = tuple(int(s) for s in x_signs)
        y_signs = tuple(int(s) for s in y_signs)
        if len(x_signs) != k or len(y_signs) != k:
            raise ValueError("need one sign per level for both draws")
        if not set(x_signs) | set(y_signs) <= {-1, 0, 1}:
            raise ValueError("signs must be -1, 0 or +1")
        with mpmath.workdps(self.dps):
            terms = []
            for lvl in range(1, k + 1):
                want = (x_signs[lvl - 1], y_signs[lvl - 1])
                for outcome, center in self._centers[lvl - 1]:
                    if outcome == want:
                        terms.append(center)
                        break
            return mpmath.fsum(terms)

    def decode(self, value) -> DecodedSample:
        """Read all level outcomes off a value, top level first.

        At level l >= 2 the value must fall strictly inside one of the nine
        intervals of half-width r_{l-1}; hitting an endpoint exactly is
        reported as a boundary outcome, matching nothing as a failure.
        Level 1 matches the nearest of its nine isolated centers within a
        quarter of their minimal spacing.
        """
        k = self.params.level_count
        xs = [0] * k
        ys = [0] * k
        with mpmath.workdps(self.dps):
            residual = mpmath.mpf(value)
            for lvl in range(k, 1, -1):
                half = self._reach[lvl - 2]
                hit = None
                for outcome, center in self._centers[lvl - 1]:
                    dist = abs(residual - center)
                    if dist < half:
                        hit = (outcome, center)
                        break
                    if dist == half:
                        return DecodedSample(
                            tuple(xs), tuple(ys), ok=False, boundary=True, fail_level=lvl
                        )
                if hit is None:
                    return DecodedSample(tuple(xs), tuple(ys), ok=False, fail_level=lvl)
                (xs[lvl - 1], ys[lvl - 1]), center = hit
                residual -= center
            tol = self._rho[0] / 4
            for outcome, center in self._centers[0]:
                if abs(residual - center) < tol:
                    xs[0], ys[0] = outcome
                    return DecodedSample(tuple(xs), tuple(ys), ok=True)
        return DecodedSample(tuple(xs), tuple(ys), ok=False, fail_level=1)


@dataclass(frozen=True)
class DecodeReport:
    """Round-trip tally for simulate_and_decode.

    ``nonzero_draws`` counts per level over both draws; ``miss_probability``
    is the per-sample chance that some suppressed level would have fired,
    1 - prod (1 - 1/q_k^2)^2 over the suppressed levels.
    """

    samples: int
    recovered: int
    failures: int
    boundary_hits: int
    nonzero_draws: tuple[int, ...]
    suppressed_levels: tuple[int, ...]
    miss_probability: float
    seed: int


def simulate_and_decode(params: LayerParams, samples: int, seed: int = 0) -> DecodeReport:
    """Draw level outcomes, encode them into one value, decode it back, and
    count exact recoveries.

    Sample i uses the (seed, i) substream; per sample the draw order is
    levels ascending, E before D, so the stream layout is part of the
    contract.  Levels whose per-draw fire log-probability -2 log q_k lies
    below FIRE_LOG_FLOOR cannot fire within any feasible budget; they are
    skipped and the skipped probability mass is reported.
    """
    samples = int(samples)
    if samples < 1:
        raise ValueError("need at least one sample")
    codec = LayerCodec(params)
    k = params.level_count
    fire_log = -2.0 * params.log_q
    suppressed = fire_log < FIRE_LOG_FLOOR
    live = [lvl for lvl in range(k) if not suppressed[lvl]]
    fire = np.exp(fire_log)
    if np.any(suppressed):
        log_keep = 2.0 * np.sum(np.log1p(-np.exp(fire_log[suppressed])))
        miss = -float(math.expm1(log_keep))
    else:
        miss = 0.0

    recovered = failures = boundary = 0
    nonzero = [0] * k
    for i in range(samples):
        rng = substream(seed, i)
        xs = [0] * k
        ys = [0] * k
        for lvl in live:
            for bucket in (xs, ys):
                u = rng.random()
                if u < 0.5 * fire[lvl]:
                    bucket[lvl] = -1
                elif u < fire[lvl]:
                    bucket[lvl] = 1
            nonzero[lvl] += (xs[lvl] != 0) + (ys[lvl] != 0)
        out = codec.decode(codec.encode(xs, ys))
        if out.boundary:
            boundary += 1
        elif out.ok and out.x_signs == tuple(xs) and out.y_signs == tuple(ys):
            recovered += 1
        else:
            failures += 1
    return DecodeReport(
        samples=samples,
        recovered=recovered,
        failures=failures,
        boundary_hits=boundary,
        nonzero_draws=tuple(nonzero),
        suppressed_levels=tuple(lvl + 1 for lvl in range(k) if suppressed[lvl]),
        miss_probability=miss,
        seed=int(seed),
    )


def level_one_window_variance(params: LayerParams, n: int) -> float:
    """Exact Var of the n-window sum of the level-1 residual process
    p_1 rho_1 (E_1 - D_1): the lag-phi(1) differencing doubles min(phi(1), n)
    variance contributions."""
    n = int(n)
    if n < 1:
        raise ValueError("the horizon must be >= 1")
    return float(2.0 * params.p[0] ** 2 * params.rho[0] ** 2 * min(int(params.phi[0]), n))


def simulate_level_one_variance(
    params: LayerParams, n: int, replicates: int, seed: int = 0
) -> float:
    """Monte-Carlo Var of the same window sum over seeded replicates.

    Level 1 is the only level whose spikes are common enough for naive
    replication: q_1 = 1 makes E_1 a plain random sign.
    """
    n = int(n)
    replicates = int(replicates)
    if n < 1 or replicates < 1:
        raise ValueError("need n >= 1 and replicates >= 1")
    phi1 = int(params.phi[0])
    rng = substream(seed, 0)
    signs = rng.integers(0, 2, size=(replicates, n + phi1)).astype(float) * 2.0 - 1.0
    sums = params.rho[0] * params.p[0] * (
        signs[:, phi1:].sum(axis=1) - signs[:, :n].sum(axis=1)
    )
    return float(np.var(sums))
