"""Verification harnesses: Perron integrals, distribution main terms,
extremal orders and Mertens-type limits.

All contour integrals are composite trapezoid sums on a uniform grid along a
vertical line ``Re z = c``; conjugate symmetry of every integrand lets us
integrate over ``0 <= Im z <= tau`` and double the real part. Each estimate
is paired with the same sum on the doubled step as a Richardson check.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from . import analytic, arith, counting, totient
from .arith import DEFAULT_CONSTANTS, Constants
from .counting import DEFAULT_REGIME, RegimeConfig, RegimeLabel
from .errors import ArgumentError, CapacityError, GeometryError, TotlabError
from .totient import TotientParams

POLE_CLEARANCE = 1e-3
RESIDUE_TAU_CAP = 200.0
EXTREMAL_PRIME_CAP = 10**7


def _trapezoid(values: np.ndarray, h: float) -> float:
    return h * (math.fsum(values) - 0.5 * (values[0] + values[-1]))


def _grid(length: float, steps_per_unit: int) -> np.ndarray:
    n = max(2, math.ceil(length * steps_per_unit))
    n += n % 2
    return np.linspace(0.0, length, n + 1)


# ---------------------------------------------------------------------------
# Perron kernel
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KernelCheck:
    y: float
    a: float
    T: float
    estimate: float
    target: float
    bound: Optional[float]


def perron_kernel_check(y: float, a: float, T: float, step: float = 0.01) -> KernelCheck:
    """``(1/2 pi i) int_{a-iT}^{a+iT} y^s / s ds`` against its limit ``h(y)``.

    ``bound`` is ``y^a / |ln y| * 2/T`` and is absent for ``y = 1``.
    """
    if not a > 0:
        raise ArgumentError("a must be positive")
    if not y > 0:
        raise ArgumentError("y must be positive")
    if T < 1:
        raise ArgumentError("T must be >= 1")
    eta = np.linspace(0.0, T, max(2, math.ceil(T / step)) + 1)
    ly = math.log(y)
    # Re(y^(a+i eta) / (a+i eta))
    vals = y**a * (a * np.cos(eta * ly) + eta * np.sin(eta * ly)) / (a * a + eta * eta)
    estimate = _trapezoid(vals, eta[1] - eta[0]) / math.pi
    target = 1.0 if y > 1 else 0.5 if y == 1 else 0.0
    bound = None if y == 1 else y**a / abs(ly) * (2.0 / T)
    return KernelCheck(y, a, T, float(estimate), target, bound)


# ---------------------------------------------------------------------------
# Perron count estimates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PerronEstimate:
    mode: str
    estimate: float
    coarse: float
    error_bound: Optional[float] = None
    residue_term: Optional[float] = None
    shifted_line: Optional[float] = None
    horizontal: Optional[float] = None


def _exact_a_line(c: np.ndarray, w: np.ndarray, b: float, eta: np.ndarray) -> np.ndarray:
    """``Re(sum_j w_j e^{z c_j} / z)`` at ``z = b + i eta`` on a uniform grid.

    The grid is cut into blocks; inside a block ``e^{i eta c}`` factors into
    a block-start phase and a per-step phase, so each block is one matrix
    product.
    """
    h = eta[1] - eta[0]
    B = 256
    n = len(eta)
    nblk = math.ceil(n / B)
    starts = eta[0] + h * B * np.arange(nblk)
    steps = h * np.arange(B)
    acc = np.zeros((nblk, B), dtype=np.complex128)
    amp = w * np.exp(b * c)
    for lo in range(0, len(c), 2048):
        cc = c[lo : lo + 2048]
        V = amp[lo : lo + 2048] * np.exp(1j * np.multiply.outer(starts, cc))
        E = np.exp(1j * np.multiply.outer(steps, cc))
        acc += V @ E.T
    total = acc.reshape(-1)[:n]
    z = b + 1j * eta
    return (total / z).real


def _main0_integrand(k: int, delta: float, x: float, y: float, zs: np.ndarray, tol: float) -> np.ndarray:
    vals, _, _ = analytic.r_values(k, zs, tol)
    log_a = math.log(y) - (1.0 - delta) * math.log(x)
    return x * vals * np.exp(zs * log_a) / (zs * (1.0 - (1.0 - delta) * zs))


def default_shift(k: int, delta: float, x: float, y: float, constants: Constants = DEFAULT_CONSTANTS) -> float:
    """Abscissa ``d`` of the shifted line, ``exp(1 / (kappa (c_k A)^(1/4)))`` for
    even ``k`` and ``exp(1 / (kappa A^(1/2)))`` for odd ``k``, ``A = (y/x) x^delta``."""
    A = math.exp(math.log(y) - (1.0 - delta) * math.log(x))
    kappa = constants.kappa_f
    if k % 2 == 0:
        ck = 1.0 / (1.0 - 2.0 ** (-k / 2))
        return math.exp(1.0 / (kappa * (ck * A) ** 0.25))
    return math.exp(1.0 / (kappa * math.sqrt(A)))


def perron_count_detail(
    k: int,
    beta,
    x: int,
    y,
    b: float,
    tau: float,
    steps: int = 40,
    mode: str = "EXACT_A",
    shift: Optional[float] = None,
    tol: float = 1e-8,
) -> PerronEstimate:
    """Numerical Perron recovery of ``#{n <= x : Phi_k(n)/n^beta <= y}``.

    EXACT_A integrates ``A_z(x) y^z / z`` over ``Re z = b``. RESIDUE_R
    replaces ``A_z(x)`` by its main term, takes the residue at
    ``z0 = 1/(1-delta)`` and integrates the remainder on ``Re z = d > z0``
    (plus the two horizontal connectors when ``b < z0``).
    """
    if not b > 0:
        raise ArgumentError("b must be positive")
    if tau < 1:
        raise ArgumentError("tau must be >= 1")
    beta = counting.parse_beta(beta)
    yq = counting.parse_rational(y)
    yf = float(yq)
    delta = float(beta - (k - 1))
    mode = mode.upper()
    if mode == "EXACT_A":
        L = counting.log_f_values(k, beta, x)
        c_all = math.log(yf) - L
        c, w = np.unique(c_all, return_counts=True)
        w = w.astype(np.float64)
        eta = _grid(tau, steps)
        vals = _exact_a_line(c, w, b, eta)
        h = eta[1] - eta[0]
        fine = _trapezoid(vals, h) / math.pi
        coarse = _trapezoid(vals[::2], 2 * h) / math.pi
        Ab = float(np.sum(w * np.exp(b * c)))  # y^b sum f(n)^-b
        return PerronEstimate("EXACT_A", float(fine), float(coarse), error_bound=Ab * 2.0 / tau)
    if mode != "RESIDUE_R":
        raise ArgumentError(f"unknown mode {mode!r}")
    if tau > RESIDUE_TAU_CAP:
        raise ArgumentError(f"RESIDUE_R needs tau <= {RESIDUE_TAU_CAP}")
    if delta >= 1:
        raise ArgumentError("RESIDUE_R needs delta < 1")
    z0 = 1.0 / (1.0 - delta)
    if abs(b - z0) < POLE_CLEARANCE:
        raise GeometryError(f"pole z0={z0} within {POLE_CLEARANCE} of the line Re z = {b}")
    xf = float(x)
    residue = analytic.r_value(k, z0, tol).value.real * yf**z0
    if b > z0:
        d = b
    else:
        d = shift if shift is not None else default_shift(k, delta, xf, yf)
        if shift is None and d < z0 + 0.05:
            d = z0 + 0.5
    if d - z0 < POLE_CLEARANCE:
        raise GeometryError(f"shifted line Re z = {d} does not clear the pole z0={z0}")
    eta = _grid(tau, steps)
    h = eta[1] - eta[0]
    line = _main0_integrand(k, delta, xf, yf, d + 1j * eta, tol).real
    right_fine = _trapezoid(line, h) / math.pi
    right_coarse = _trapezoid(line[::2], 2 * h) / math.pi
    horiz_fine = horiz_coarse = 0.0
    if b < z0:
        t = b + _grid(d - b, steps)
        top = _main0_integrand(k, delta, xf, yf, t + 1j * tau, tol).imag
        ht = t[1] - t[0]
        horiz_fine = -_trapezoid(top, ht) / math.pi
        horiz_coarse = -_trapezoid(top[::2], 2 * ht) / math.pi
    return PerronEstimate(
        "RESIDUE_R",
        float(residue + right_fine + horiz_fine),
        float(residue + right_coarse + horiz_coarse),
        residue_term=float(residue),
        shifted_line=float(right_fine),
        horizontal=float(horiz_fine),
    )


def perron_count_estimate(k, beta, x, y, b, tau, steps=40, mode="EXACT_A", **kwargs) -> float:
    """The fine-grid estimate of :func:`perron_count_detail`."""
    return perron_count_detail(k, beta, x, y, b, tau, steps, mode, **kwargs).estimate


# ---------------------------------------------------------------------------
# distribution
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VerificationRow:
    params: TotientParams
    x: int
    y: Fraction
    exact_count: int
    main_term: Optional[float]
    rel_err: Optional[float]
    regime: Optional[RegimeLabel]
    sample_checks: int = 0


def main_term(k: int, beta, y) -> float:
    """``R_k(1/(1-delta)) y^(1/(1-delta))``."""
    delta = float(counting.parse_beta(beta) - (k - 1))
    if delta >= 1:
        raise ArgumentError("main term needs delta < 1")
    z0 = 1.0 / (1.0 - delta)
    return analytic.r_value(k, z0).value.real * float(counting.parse_rational(y)) ** z0


def _cross_check(k: int, beta: Fraction, x: int, y: Fraction, stride: int, seed: int) -> int:
    """Re-decide every ``stride``-th ``n`` through exact ``Phi_k(n)``."""
    rng = random.Random(seed)
    start = rng.randrange(1, stride + 1)
    checked = 0
    delta = beta - (k - 1)
    for n in range(start, x + 1, stride):
        fac = arith.factorize(n)
        phi_form = counting.rational_le(Fraction(totient.phi_k_from_factorization(fac, k)), y, n, beta)
        phi = 1
        for p, e in fac:
            phi *= p ** (e - 1) * (p - 1)
        alpha_form = counting.rational_le(phi * totient.alpha_product(fac, k), y, n, delta)
        if phi_form != alpha_form:
            raise TotlabError(f"form mismatch at n={n}")
        checked += 1
    return checked


def verify_distribution(
    k: int,
    beta,
    x: int,
    alphas: Sequence = (),
    ys: Optional[Sequence] = None,
    config: RegimeConfig = DEFAULT_REGIME,
    sample_stride: int = 1000,
    threads: int = 1,
) -> List[VerificationRow]:
    """Exact counts against the main term, one row per ``alpha = y/x``.

    ``ys`` may be given instead of ``alphas`` to set ``y`` directly.
    """
    params = TotientParams(int(k), counting.parse_beta(beta))
    if ys is None:
        yq = [counting.parse_rational(a) * x for a in alphas]
    else:
        yq = [counting.parse_rational(y) for y in ys]
    for y in yq:
        if y <= 0:
            raise ArgumentError("y must be positive")
    counts = counting.count_many(params.k, params.beta, x, yq, threads=threads)
    rows = []
    for y, cnt in zip(yq, counts):
        label = counting._regime_or_none(params.k, params.beta, x, y, config)
        mt = rel = None
        if label is not None and label.tag.has_main_term:
            mt = main_term(params.k, params.beta, y)
            rel = abs(cnt - mt) / max(mt, 1.0)
        checks = _cross_check(params.k, params.beta, x, y, sample_stride, seed=x) if sample_stride else 0
        rows.append(VerificationRow(params, x, y, cnt, mt, rel, label, checks))
    return rows


# ---------------------------------------------------------------------------
# extremal orders
# ---------------------------------------------------------------------------


def minimal_constant(k: int, constants: Constants = DEFAULT_CONSTANTS) -> float:
    """Constant ``c`` in the minimal order ``c n^k / lnln n`` of ``Phi_k``."""
    if k < 1:
        raise ArgumentError("k must be >= 1")
    base = math.exp(-constants.gamma_f)
    if k % 2:
        return base
    h = k // 2
    if k % 4 == 0:
        return base * (2.0**h / (2.0**h - 1.0)) / analytic.zeta_real(h)
    return base / analytic.l_chi1(h)


@dataclass(frozen=True)
class ExtremalRow:
    """``kind="min"``: primorial ``n_s`` and ``Phi_k(n_s) lnln(n_s) / n_s^k / c``.
    ``kind="max"``: the ``s``-th prime ``p`` and ``Phi_k(p) / p^k``."""

    kind: str
    s: int
    ratio: float
    log_n: float

    @property
    def n_s(self) -> int:
        if self.kind == "min":
            return arith.primorial(self.s)
        return int(arith.first_primes(self.s)[-1])


def verify_extremal(k: int, s_max: int, constants: Constants = DEFAULT_CONSTANTS) -> List[ExtremalRow]:
    """Minimal-order rows for ``s = 2..s_max`` then ten maximal-order rows."""
    if k < 1:
        raise ArgumentError("k must be >= 1")
    if s_max < 2:
        raise ArgumentError("s_max must be >= 2")
    primes = arith.first_primes(s_max)
    if len(primes) < s_max or primes[-1] > EXTREMAL_PRIME_CAP:
        raise CapacityError(f"p_s must stay below {EXTREMAL_PRIME_CAP}")
    pf = primes.astype(np.float64)
    local = np.log1p(-1.0 / pf) + totient.log_alpha_primes(primes, k)
    log_ratio = np.cumsum(local)
    theta = np.cumsum(np.log(pf))
    c = minimal_constant(k, constants)
    ratio = np.exp(log_ratio) * np.log(theta) / c
    rows = [ExtremalRow("min", s, float(ratio[s - 1]), float(theta[s - 1])) for s in range(2, s_max + 1)]
    top = range(max(0, s_max - 10), s_max)
    for i in top:
        rows.append(ExtremalRow("max", i + 1, float(math.exp(local[i])), float(math.log(pf[i]))))
    return rows


# ---------------------------------------------------------------------------
# Mertens
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MertensRow:
    x: int
    quantity: str
    value: float
    limit: float
    deviation: float


def verify_mertens(xs: Sequence[int], constants: Constants = DEFAULT_CONSTANTS) -> List[MertensRow]:
    """The four Mertens-type quantities at each ``x`` and their limits.

    ``deviation`` is ``value - limit``; for the plain product the value is
    scaled to ``prod (1 - 1/p) ln x e^gamma`` so its limit is 1, and for the
    prime sum the value is ``sum 1/p - lnln x`` with limit ``b0``.
    """
    rows = []
    g = constants.gamma_f
    b0 = constants.b0_f
    for x in xs:
        x = int(x)
        if x < 10:
            raise ArgumentError("x must be >= 10")
        s = analytic.mertens_sum(x)
        rows.append(MertensRow(x, "sum_1/p", s, math.nan, math.nan))
        shifted = s - math.log(math.log(x))
        rows.append(MertensRow(x, "sum_1/p-lnlnx", shifted, b0, shifted - b0))
        prod = analytic.mertens_product(x)
        rows.append(MertensRow(x, "prod_1-1/p", prod, math.nan, math.nan))
        scaled = prod * math.log(x) * math.exp(g)
        rows.append(MertensRow(x, "prod_1-1/p*lnx*e^gamma", scaled, 1.0, scaled - 1.0))
        for j in (2, 3):
            v = analytic.mertens_product_power(x, j)
            lim = 1.0 / analytic.zeta_real(j)
            rows.append(MertensRow(x, f"prod_1-p^-{j}", v, lim, v - lim))
        for j in (1, 2):
            v = analytic.mertens_product_chi(x, j)
            lim = 1.0 / analytic.l_chi1(j)
            rows.append(MertensRow(x, f"prod_1-chi1(p)p^-{j}", v, lim, v - lim))
    return rows
