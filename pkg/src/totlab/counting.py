"""Exact counts of ``n <= x`` with ``Phi_k(n) / n^beta <= y`` and related sums.

Comparisons run in the log domain. Any ``n`` whose log-gap to the boundary is
within ``GUARD`` is re-decided with exact integer arithmetic, so counts never
depend on floating-point ties.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import arith, totient
from .arith import DEFAULT_CONSTANTS, Constants
from .errors import ArgumentError, CapacityError

GUARD = 1e-9
COUNT_CAP = 10**8
BATEMAN_CAP = 10**7
MAX_BETA_DENOMINATOR = 64
EPSILON_DEFAULT = 0.01


# ---------------------------------------------------------------------------
# rational parsing and exact comparison
# ---------------------------------------------------------------------------


def parse_rational(value) -> Fraction:
    """Exact rational from an int, Fraction, decimal string or ``"p/q"``.

    Floats go through their shortest repr, so ``0.1`` becomes ``1/10``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ArgumentError(f"not a finite number: {value}")
        return Fraction(repr(value))
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ArgumentError(f"cannot parse {value!r} as a rational") from exc


def parse_beta(value) -> Fraction:
    beta = parse_rational(value)
    if beta.denominator > MAX_BETA_DENOMINATOR:
        raise ArgumentError(f"beta denominator must be <= {MAX_BETA_DENOMINATOR}, got {beta}")
    return beta


def rational_le(lhs: Fraction, y: Fraction, n: int, e: Fraction) -> bool:
    """Exact test of ``lhs <= y * n^e`` for positive rationals and rational ``e``."""
    a, b = e.numerator, e.denominator
    # raise both sides to the b-th power; a < 0 moves n^|a| to the left
    L = lhs**b
    R = y**b
    if a >= 0:
        R *= n**a
    else:
        L *= n ** (-a)
    return L <= R


# ---------------------------------------------------------------------------
# regimes
# ---------------------------------------------------------------------------


class Regime(str, enum.Enum):
    THM3_MAIN = "THM3_MAIN"
    THM4_BOUND = "THM4_BOUND"
    THM5_BOUND = "THM5_BOUND"
    THM6_MAIN = "THM6_MAIN"
    THM7_MAIN = "THM7_MAIN"
    THM7_BOUND = "THM7_BOUND"
    TRIVIAL_FULL = "TRIVIAL_FULL"
    TRIVIAL_EMPTY = "TRIVIAL_EMPTY"

    @property
    def has_main_term(self) -> bool:
        return self in (Regime.THM3_MAIN, Regime.THM6_MAIN, Regime.THM7_MAIN)


@dataclass(frozen=True)
class RegimeLabel:
    tag: Regime
    threshold_y: Optional[float] = None


@dataclass(frozen=True)
class RegimeConfig:
    """Free constants of the regime thresholds; all overridable."""

    epsilon: float = EPSILON_DEFAULT
    constants: Constants = field(default_factory=lambda: DEFAULT_CONSTANTS)
    c_k: Optional[float] = None

    def ck(self, k: int) -> float:
        if self.c_k is not None:
            return self.c_k
        if k % 2:
            return 1.0
        return 1.0 / (1.0 - 2.0 ** (-k / 2))


DEFAULT_REGIME = RegimeConfig()


def thm3_threshold(k: int, delta: float, x: float, config: RegimeConfig = DEFAULT_REGIME) -> float:
    """``(log(1/(1-delta) + eps))^-4 / (c_k kappa^4) * x^(1-delta)`` for ``0 < delta < 1``."""
    kappa = config.constants.kappa_f
    lg = math.log(1.0 / (1.0 - delta) + config.epsilon)
    return lg**-4 / (config.ck(k) * kappa**4) * x ** (1.0 - delta)


def thm7_holds(delta: float, x: float, y: float) -> bool:
    """``x (log x loglog x)^(1/2) < e^(1-delta) y^(1/(1-delta) - 1/log x)``, in logs."""
    lx = math.log(x)
    lhs = lx + 0.5 * math.log(lx * math.log(lx)) if lx > 1 else -math.inf
    rhs = (1.0 - delta) + (1.0 / (1.0 - delta) - 1.0 / lx) * math.log(y)
    return lhs < rhs


def thm7_threshold(delta: float, x: float) -> float:
    """The ``y`` at which the THM7 inequality turns into equality.

    For ``x <= e`` the left side has no real logarithm and the inequality
    holds for every ``y > 0``; the threshold is then 0.
    """
    lx = math.log(x)
    if lx <= 1:
        return 0.0
    lhs = lx + 0.5 * math.log(lx * math.log(lx))
    return math.exp((lhs - (1.0 - delta)) / (1.0 / (1.0 - delta) - 1.0 / lx))


def classify_regime(k: int, beta, x: int, y, config: RegimeConfig = DEFAULT_REGIME) -> RegimeLabel:
    """Decide which distribution regime governs ``(k, beta, x, y)``.

    ``delta`` is compared exactly; thresholds are compared in floating point.
    ``TRIVIAL_EMPTY`` is returned first whenever ``y < min(1, x^-beta)``, a
    certified lower bound on ``Phi_k(n)/n^beta`` over ``n <= x``.
    """
    if int(k) < 1:
        raise ArgumentError("k must be >= 1")
    if x < 2:
        raise ArgumentError("x must be >= 2")
    beta = parse_beta(beta)
    y = parse_rational(y)
    if y <= 0:
        raise ArgumentError("y must be positive")
    delta = beta - (k - 1)
    yf, xf = float(y), float(x)
    floor = 1.0 if beta <= 0 else math.exp(-float(beta) * math.log(xf))
    if yf < floor:
        return RegimeLabel(Regime.TRIVIAL_EMPTY, floor)
    if delta == 0:
        return RegimeLabel(Regime.THM6_MAIN)
    d = float(delta)
    if 0 < delta < 1:
        thr = thm3_threshold(k, d, xf, config)
        if y > x:
            return RegimeLabel(Regime.TRIVIAL_FULL, xf)
        if yf <= thr:
            return RegimeLabel(Regime.THM3_MAIN, thr)
        return RegimeLabel(Regime.THM4_BOUND, thr)
    if delta < 0:
        if y < x:
            return RegimeLabel(Regime.THM5_BOUND)
        thr = thm7_threshold(d, xf)
        if thm7_holds(d, xf, yf):
            return RegimeLabel(Regime.THM7_MAIN, thr)
        return RegimeLabel(Regime.THM7_BOUND, thr)
    # delta >= 1: Phi_k(n)/n^beta <= n^(1-delta) <= 1
    if y >= 1:
        return RegimeLabel(Regime.TRIVIAL_FULL, 1.0)
    raise ArgumentError("delta >= 1 with y < 1 is outside every covered regime")


# ---------------------------------------------------------------------------
# counting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CountRecord:
    k: int
    beta: Fraction
    x: int
    y: Fraction
    count: int
    regime: Optional[RegimeLabel]
    exact_checks: int = 0


def _check_x(x: int) -> int:
    x = int(x)
    if x < 1:
        raise ArgumentError("x must be >= 1")
    if x > COUNT_CAP:
        raise CapacityError(f"x limited to {COUNT_CAP}")
    return x


def _regime_or_none(k, beta, x, y, config) -> Optional[RegimeLabel]:
    try:
        return classify_regime(k, beta, x, y, config)
    except ArgumentError:
        return None


def _count_alpha_form(k: int, beta: Fraction, x: int, y: Fraction, threads: int = 1) -> Tuple[int, int]:
    """Count via ``phi(n) alpha_k(n) / n^delta <= y`` on sieve segments."""
    delta = beta - (k - 1)
    d = float(delta)
    ly = math.log(y.numerator) - math.log(y.denominator)
    total = 0
    checks = 0
    for seg in totient.iter_segments(x, k, threads=threads):
        ln = np.log(seg.n.astype(np.float64))
        # ln(phi alpha / n^delta) - ln y
        gap = (1.0 - d) * ln + seg.log_phi + seg.log_alpha - ly
        close = np.abs(gap) <= GUARD
        total += int(np.count_nonzero((gap < 0) & ~close))
        for n in seg.n[close].tolist():
            checks += 1
            fac = arith.factorize(n) if n > 1 else []
            phi = 1
            for p, e in fac:
                phi *= p ** (e - 1) * (p - 1)
            value = phi * totient.alpha_product(fac, k)
            total += rational_le(value, y, n, delta)
    return total, checks


def _count_phi_form(k: int, beta: Fraction, x: int, y: Fraction) -> Tuple[int, int]:
    """Count via exact ``Phi_k(n)`` values against ``y n^beta``."""
    ly = math.log(y.numerator) - math.log(y.denominator)
    b = float(beta)
    total = 0
    checks = 0
    for tv in totient.phi_k_range(x, k, exact=True):
        value = tv.exact
        gap = math.log(value) - b * math.log(tv.n) - ly
        if abs(gap) > GUARD:
            total += gap < 0
        else:
            checks += 1
            total += rational_le(Fraction(value), y, tv.n, beta)
    return total, checks


def count_phi_ratio(
    k: int,
    beta,
    x: int,
    y,
    form: str = "alpha",
    config: RegimeConfig = DEFAULT_REGIME,
    threads: int = 1,
) -> CountRecord:
    """``#{n <= x : Phi_k(n) / n^beta <= y}``.

    ``form="alpha"`` evaluates the equivalent ``phi(n) alpha_k(n) / n^delta``
    condition from sieve data; ``form="phi"`` materializes every ``Phi_k(n)``.
    """
    k = int(k)
    if k < 1:
        raise ArgumentError("k must be >= 1")
    x = _check_x(x)
    beta = parse_beta(beta)
    y = parse_rational(y)
    if y <= 0:
        raise ArgumentError("y must be positive")
    if form == "alpha":
        count, checks = _count_alpha_form(k, beta, x, y, threads)
    elif form == "phi":
        count, checks = _count_phi_form(k, beta, x, y)
    else:
        raise ArgumentError(f"unknown form {form!r}")
    return CountRecord(k, beta, x, y, count, _regime_or_none(k, beta, x, y, config), checks)


def count_many(k: int, beta, x: int, ys: Sequence, threads: int = 1) -> List[int]:
    """Counts for several ``y`` values in one pass over the sieve."""
    beta = parse_beta(beta)
    x = _check_x(x)
    yq = [parse_rational(y) for y in ys]
    delta = beta - (k - 1)
    d = float(delta)
    lys = np.array([math.log(y.numerator) - math.log(y.denominator) for y in yq])
    totals = [0] * len(yq)
    for seg in totient.iter_segments(x, k, threads=threads):
        ln = np.log(seg.n.astype(np.float64))
        val = (1.0 - d) * ln + seg.log_phi + seg.log_alpha
        order = np.sort(val)
        for i, (y, ly) in enumerate(zip(yq, lys)):
            lo = int(np.searchsorted(order, ly - GUARD, side="left"))
            hi = int(np.searchsorted(order, ly + GUARD, side="right"))
            totals[i] += lo
            if hi > lo:
                for n in seg.n[np.abs(val - ly) <= GUARD].tolist():
                    fac = arith.factorize(n) if n > 1 else []
                    phi = 1
                    for p, e in fac:
                        phi *= p ** (e - 1) * (p - 1)
                    totals[i] += rational_le(phi * totient.alpha_product(fac, k), y, n, delta)
    return totals


def empirical_cdf(k: int, x: int, grid: Iterable[float]) -> List[Tuple[float, float]]:
    """``(alpha, (1/x) #{n <= x : Phi_k(n)/n^k <= alpha})`` for each grid point."""
    x = _check_x(x)
    grid = list(grid)
    for a in grid:
        if not 0.0 <= float(a) <= 1.0:
            raise ArgumentError(f"grid value {a} outside [0, 1]")
    out = []
    positive = [a for a in grid if float(a) > 0]
    counts = dict(zip(map(float, positive), count_many(k, k, x, [parse_rational(a) for a in positive])))
    for a in grid:
        c = counts.get(float(a), 0)
        out.append((float(a), c / x))
    return out


def summatory_A(k: int, beta, z: complex, x: int, threads: int = 1) -> complex:
    """``sum_{n <= x} (Phi_k(n) / n^beta)^-z`` summed in ascending ``n``."""
    x = _check_x(x)
    beta = parse_beta(beta)
    d = float(beta - (k - 1))
    z = complex(z)
    re_parts, im_parts = [], []
    for seg in totient.iter_segments(x, k, threads=threads):
        L = (1.0 - d) * np.log(seg.n.astype(np.float64)) + seg.log_ratio
        terms = np.exp(-z * L)
        re_parts.append(math.fsum(terms.real))
        im_parts.append(math.fsum(terms.imag))
    return complex(math.fsum(re_parts), math.fsum(im_parts))


def log_f_values(k: int, beta, x: int, threads: int = 1) -> np.ndarray:
    """``ln(Phi_k(n) / n^beta)`` for ``n = 1..x`` as one array."""
    beta = parse_beta(beta)
    d = float(beta - (k - 1))
    parts = []
    for seg in totient.iter_segments(_check_x(x), k, threads=threads):
        parts.append((1.0 - d) * np.log(seg.n.astype(np.float64)) + seg.log_ratio)
    return np.concatenate(parts)


# ---------------------------------------------------------------------------
# Bateman's M(y)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BatemanResult:
    y: int
    count: int
    cutoff: int
    window_min_phi: int
    tail_lower_bound: float


def _phi_lower_bound(n: float) -> float:
    """``n / (e^gamma lnln n + 3 / lnln n)``, a lower bound for phi(n), n >= 3."""
    ll = math.log(math.log(n))
    return n / (math.exp(DEFAULT_CONSTANTS.gamma_f) * ll + 3.0 / ll)


def bateman_count(y: int, threads: int = 1) -> BatemanResult:
    """Exact ``#{m : phi(m) <= y}``.

    Scans ``m <= X`` and certifies the cut: every ``m`` in ``(X, 2X]`` must
    have ``phi(m) > y``, and the analytic lower bound for ``phi`` (increasing
    beyond ``2X``) must exceed ``y`` at ``2X``. On failure ``X`` doubles.
    """
    y = int(y)
    if y < 1:
        raise ArgumentError("y must be a positive integer")
    if y > BATEMAN_CAP:
        raise CapacityError(f"bateman_count limited to y <= {BATEMAN_CAP}")
    X = math.ceil(8 * y * math.log(math.log(y + 16))) + 100
    for _ in range(4):
        count = 0
        for seg in totient.iter_segments(X, 1, with_phi=True, threads=threads):
            count += int(np.count_nonzero(seg.phi <= y))
        window_min = None
        for seg in totient.iter_segments(2 * X, 1, with_phi=True, threads=threads, start=X + 1):
            m = int(seg.phi.min())
            window_min = m if window_min is None else min(window_min, m)
        tail = _phi_lower_bound(2.0 * X)
        if window_min > y and tail > y:
            return BatemanResult(y, count, X, window_min, tail)
        X *= 2
    raise CapacityError("bateman certificate failed after repeated doubling")
