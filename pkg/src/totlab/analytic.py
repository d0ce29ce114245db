"""Zeta and L-values, the Euler product R_k(z), and Mertens-type products.

``r_value`` evaluates

    R_k(z) = prod_p (1 - 1/p + (1/p) (p/(p-1))^z alpha_k(p)^(-z))

as a finite product over ``p <= P`` times an accelerated tail. Writing
``q = 1/p``, the log of each local factor is a power series
``g(q) = sum_{m>=2} g_m(z) q^m`` whose coefficients depend on ``p`` only
through ``eps = chi_1(p)`` (or not at all). The tail is then
``sum_m g_m(z) S_eps(m, P)`` with ``S_eps(m, P) = sum_{p > P, class eps} p^-m``,
and everything beyond order ``M`` is bounded by a Cauchy estimate for ``g`` on
a disc ``|q| <= rho``. The bound is reported as ``tail_bound``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence, Tuple

import numpy as np

from . import arith
from .errors import ArgumentError, CapacityError, DomainError, PrecisionError

EPS = 2.0**-52

# Bernoulli numbers B_2 .. B_16
_BERNOULLI = (
    1.0 / 6,
    -1.0 / 30,
    1.0 / 42,
    -1.0 / 30,
    5.0 / 66,
    -691.0 / 2730,
    7.0 / 6,
    -3617.0 / 510,
)

SERIES_ORDER = 12
R_PRIME_CAP = 10**8


# ---------------------------------------------------------------------------
# complex helpers
# ---------------------------------------------------------------------------


def cexpm1(w):
    """``exp(w) - 1`` for complex input without cancellation near 0."""
    w = np.asarray(w, dtype=np.complex128)
    a, b = w.real, w.imag
    re = np.expm1(a) * np.cos(b) - 2.0 * np.sin(b / 2.0) ** 2
    im = np.exp(a) * np.sin(b)
    return re + 1j * im


def clog1p(w):
    """``log(1 + w)`` for complex input, accurate for small ``|w|``."""
    w = np.asarray(w, dtype=np.complex128)
    a, b = w.real, w.imag
    re = 0.5 * np.log1p(2.0 * a + a * a + b * b)
    im = np.arctan2(b, 1.0 + a)
    return re + 1j * im


# ---------------------------------------------------------------------------
# zeta and L(s, chi_1)
# ---------------------------------------------------------------------------


def zeta_real(s: float) -> float:
    """Riemann zeta for real ``s > 1`` by Euler-Maclaurin summation."""
    s = float(s)
    if not s > 1.0:
        raise DomainError("zeta_real needs s > 1")
    if s > 60.0:
        # terms beyond 3^-s are below double precision
        return 1.0 + 2.0**-s + 3.0**-s
    N = max(20, 4 * math.ceil(s))
    head = math.fsum(n**-s for n in range(N - 1, 0, -1))
    tail = N ** (1.0 - s) / (s - 1.0) + 0.5 * N**-s
    rising = s  # s (s+1) ... (s+2j-2)
    power = N ** (-s - 1.0)
    fact = 2.0
    for j, b2j in enumerate(_BERNOULLI, start=1):
        tail += b2j / fact * rising * power
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        power /= N * N
        fact *= (2 * j + 1) * (2 * j + 2)
    return head + tail


def l_chi1(j: float, depth: int = 30) -> float:
    """``L(j, chi_1) = 1 - 3^-j + 5^-j - ...`` for real ``j >= 1``.

    Partial sums ``S_0..S_depth`` are averaged pairwise ``depth`` times; the
    averaging is started after a block of directly summed terms so that the
    result is accurate to about 1e-13 even at ``j = 1``.
    """
    j = float(j)
    if j < 1.0:
        raise DomainError("l_chi1 needs j >= 1")
    if j > 60.0:
        return 1.0 - 3.0**-j + 5.0**-j
    head_terms = 64
    head = math.fsum((-1) ** m * (2 * m + 1) ** -j for m in range(head_terms))
    sums = []
    acc = head
    for m in range(head_terms, head_terms + depth + 1):
        acc += (-1) ** m * (2 * m + 1) ** -j
        sums.append(acc)
    for _ in range(depth):
        sums = [(a + b) / 2.0 for a, b in zip(sums, sums[1:])]
    return sums[0]


def _mobius(n: int) -> int:
    out = 1
    for _, e in arith.factorize(n):
        if e > 1:
            return 0
        out = -out
    return out


@lru_cache(maxsize=None)
def prime_zeta(m: int) -> float:
    """``sum_p p^-m`` for integer ``m >= 2`` via ``sum_j mu(j)/j log zeta(jm)``."""
    if m < 2:
        raise DomainError("prime_zeta needs m >= 2")
    total = []
    j = 1
    while True:
        lz = math.log(zeta_real(j * m)) if j * m <= 60 else 2.0 ** (-j * m)
        if lz < 1e-18:
            break
        mu = _mobius(j)
        if mu:
            total.append(mu * lz / j)
        j += 1
    return math.fsum(total)


@lru_cache(maxsize=None)
def prime_l_chi1(m: int) -> float:
    """``sum_p chi_1(p) p^-m`` for integer ``m >= 2``.

    Uses ``sum_j mu(j)/j log L(jm, chi_1^j)`` where ``chi_1^j`` is the
    principal character mod 4 for even ``j``.
    """
    if m < 2:
        raise DomainError("prime_l_chi1 needs m >= 2")
    total = []
    j = 1
    while True:
        s = j * m
        if j % 2:
            ll = math.log(l_chi1(s)) if s <= 60 else -(3.0**-s)
        else:
            ll = math.log(zeta_real(s) * (1.0 - 2.0**-s)) if s <= 60 else 3.0**-s
        if abs(ll) < 1e-18:
            break
        mu = _mobius(j)
        if mu:
            total.append(mu * ll / j)
        j += 1
    return math.fsum(total)


# ---------------------------------------------------------------------------
# Euler factors and R_k(z)
# ---------------------------------------------------------------------------


def _log_u(p: np.ndarray, k: int) -> np.ndarray:
    """``u_p = ln(p/(p-1)) - ln alpha_k(p)`` (real, per prime)."""
    from .totient import log_alpha_primes

    pf = np.asarray(p, dtype=np.float64)
    return -np.log1p(-1.0 / pf) - log_alpha_primes(np.asarray(p, dtype=np.int64), k)


def euler_factor(p: int, z: complex, k: int) -> complex:
    """Local factor ``1 - 1/p + (1/p) (p/(p-1))^z alpha_k(p)^-z`` of R_k(z)."""
    if k < 1:
        raise ArgumentError("k must be >= 1")
    u = float(_log_u(np.array([p]), k)[0])
    return complex(1.0 + cexpm1(complex(z) * u) / p)


def _log_factors(primes: np.ndarray, zs: np.ndarray, k: int) -> np.ndarray:
    """``log f_p(z)`` for every (z, p) pair; shape ``(len(zs), len(primes))``."""
    u = _log_u(primes, k)
    inv_p = 1.0 / primes.astype(np.float64)
    w = cexpm1(np.multiply.outer(zs, u)) * inv_p
    return clog1p(w)


def _series_coefficients(zs: np.ndarray, k: int, eps: int, order: int) -> np.ndarray:
    """Coefficients ``g_m(z)``, m = 0..order, of ``log f`` in powers of ``q = 1/p``."""
    h = k // 2
    u = np.zeros(order + 1)
    for m in range(1, order + 1):
        u[m] = 1.0 / m
        if eps and m % h == 0:
            u[m] += eps ** (m // h) / (m // h)
    zs = np.asarray(zs, dtype=np.complex128)
    a = np.multiply.outer(u, zs)  # z * u(q)
    # E = exp(a): E_0 = 1, n E_n = sum_j j a_j E_{n-j}
    E = np.zeros_like(a)
    E[0] = 1.0
    for n in range(1, order + 1):
        E[n] = sum(j * a[j] * E[n - j] for j in range(1, n + 1)) / n
    # f = 1 + q (E - 1)
    f = np.zeros_like(a)
    f[0] = 1.0
    f[2:] = E[1:order]
    # g = log f: n g_n = n f_n - sum_{j<n} j g_j f_{n-j}
    g = np.zeros_like(a)
    for n in range(1, order + 1):
        g[n] = f[n] - sum(j * g[j] * f[n - j] for j in range(1, n)) / n
    return g


def _classes(k: int) -> Tuple[Tuple[int, int], ...]:
    """``(eps, prime set)`` pairs for primes above the cut.

    The prime set is 0 for all primes and +1/-1 for ``p = 1`` / ``p = 3 mod 4``.
    """
    if k % 2 == 1:
        return ((0, 0),)
    if k % 4 == 0:
        return ((1, 0),)
    return ((1, 1), (-1, -1))


@lru_cache(maxsize=16)
def _tail_power_sums(P: int, order: int) -> Tuple[dict, float]:
    """``S_eps(m, P)`` for eps in {all, +1, -1} and m = 2..order.

    m <= 3 comes from prime zeta values minus the head; larger m from a
    direct sum over ``P < p <= 16 P``; the returned remainders bound
    ``sum_{n > 16P} n^-m`` for each such m.
    """
    P2 = max(16 * P, 2**22)
    head = arith.small_primes(P).astype(np.float64)
    mid_all = arith.small_primes(P2)
    mid = mid_all[np.searchsorted(mid_all, P, side="right") :]
    midf = mid.astype(np.float64)
    chi_head = np.where(head.astype(np.int64) % 4 == 1, 1.0, -1.0)
    chi_head[head == 2] = 0.0
    chi_mid = np.where(mid % 4 == 1, 1.0, -1.0)
    sums = {}
    for m in range(2, order + 1):
        if m <= 3:
            t0 = prime_zeta(m) - math.fsum(head**-m)
            t1 = prime_l_chi1(m) - math.fsum(chi_head * head**-m)
        else:
            t0 = math.fsum(midf**-m)
            t1 = math.fsum(chi_mid * midf**-m)
        sums[(0, m)] = t0
        sums[(1, m)] = 0.5 * (t0 + t1)
        sums[(-1, m)] = 0.5 * (t0 - t1)
    remainder = {m: float(P2) ** (1 - m) / (m - 1) for m in range(4, order + 1)}
    return sums, remainder


def _cauchy_bound(zabs: float, k: int, P: int, order: int) -> float:
    """Bound on ``|sum_{p > P} (g(1/p) - sum_{m <= order} g_m p^-m)|``."""
    h = k // 2
    best = math.inf
    for rho in np.geomspace(1.0 / P * 1.01, 0.5, 200):
        U = -math.log1p(-rho)
        if k % 2 == 0:
            U += -math.log1p(-(rho**h))
        expo = zabs * U
        if expo > 700:
            break
        W = rho * math.expm1(expo)
        if W >= 0.9:
            break
        B = -math.log1p(-W)
        ratio = 1.0 / (rho * P)
        bound = B * rho ** -(order + 1) / (1.0 - ratio) * P**-order / order
        best = min(best, bound)
    return best


def _choose_cut(zabs: float, k: int, tol: float, order: int) -> Tuple[int, float]:
    P = max(1000, int(50 * zabs))
    while True:
        if P > R_PRIME_CAP:
            raise PrecisionError(f"tail bound {tol} needs a prime cut above {R_PRIME_CAP}")
        bound = _cauchy_bound(zabs, k, P, order)
        if bound <= tol / 4:
            return P, bound
        P *= 4


@dataclass(frozen=True)
class EulerProductResult:
    """A truncated Euler product with a certified relative tail bound."""

    value: complex
    truncation_prime: int
    tail_bound: float


def r_values(k: int, zs: Sequence[complex], tol: float = 1e-10, order: int = SERIES_ORDER):
    """Vectorized :func:`r_value`; returns ``(values, P, tail_bounds)``."""
    if k < 1:
        raise ArgumentError("k must be >= 1")
    if tol < 1e-12:
        raise PrecisionError("tolerance below 1e-12 is not reachable in double precision")
    zs = np.atleast_1d(np.asarray(zs, dtype=np.complex128))
    zabs = float(np.max(np.abs(zs))) if zs.size else 0.0
    if zabs > 1e4:
        raise ArgumentError("|z| must be <= 1e4")
    P, series_bound = _choose_cut(max(zabs, 1e-300), k, tol, order)
    primes = arith.small_primes(P)
    sums, rem = _tail_power_sums(P, order)
    values = np.empty(zs.shape, dtype=np.complex128)
    bounds = np.empty(zs.shape, dtype=np.float64)
    chunk = max(1, 2_000_000 // max(len(primes), 1))
    for start in range(0, len(zs), chunk):
        zc = zs[start : start + chunk]
        logs = _log_factors(primes, zc, k)
        # correctly rounded row sums; only per-term errors remain
        head = np.array([complex(math.fsum(r.real), math.fsum(r.imag)) for r in logs])
        abs_head = np.abs(logs).sum(axis=1)
        tail = np.zeros(zc.shape, dtype=np.complex128)
        rem_bound = np.zeros(zc.shape)
        for eps, cls in _classes(k):
            g = _series_coefficients(zc, k, eps, order)
            for m in range(2, order + 1):
                tail += g[m] * sums[(cls, m)]
                if m >= 4:
                    rem_bound += np.abs(g[m]) * rem[m]
        total = head + tail
        values[start : start + chunk] = np.exp(total)
        rounding = 8 * EPS * (order + 4) * np.maximum(1.0, abs_head + np.abs(tail))
        delta = series_bound + rem_bound + rounding
        bounds[start : start + chunk] = np.expm1(delta)
    if zabs == 0.0:
        values[:] = 1.0
        bounds[:] = 0.0
    if np.any(bounds > tol):
        raise PrecisionError(f"tail bound {bounds.max():.3g} exceeds tolerance {tol}")
    return values, P, bounds


def r_value(k: int, z: complex, tol: float = 1e-10) -> EulerProductResult:
    """``R_k(z)`` with certified relative tail bound ``<= tol``."""
    values, P, bounds = r_values(k, [z], tol)
    return EulerProductResult(complex(values[0]), P, float(bounds[0]))


def r_value_direct(k: int, z: complex, limit: int) -> complex:
    """Plain truncated product over ``p <= limit`` (no tail correction)."""
    primes = arith.primes_up_to(limit)
    logs = _log_factors(primes, np.array([complex(z)]), k)[0]
    return complex(np.exp(math.fsum(logs.real) + 1j * math.fsum(logs.imag)))


def r_value_direct_tail_bound(k: int, z: complex, limit: int) -> float:
    """Crude bound on the relative error of :func:`r_value_direct`.

    Each omitted factor is ``1 + w_p`` with ``|w_p| <= 2|z| e^t / (p(p-1))``,
    ``t = 2|z|/(limit-1)``; primes above ``limit`` are bounded through
    ``pi(t) < 1.25506 t / ln t``.
    """
    zabs = abs(complex(z))
    t0 = 2 * zabs / (limit - 1)
    C = 2 * zabs * math.exp(t0)
    S = 2.55 * C / (limit * math.log(limit))
    return math.expm1(S)


# ---------------------------------------------------------------------------
# Mertens-type sums and products
# ---------------------------------------------------------------------------


def _primes_for(x: float) -> np.ndarray:
    if x < 2:
        raise DomainError("x must be >= 2")
    return arith.small_primes(int(x)).astype(np.float64)


def mertens_sum(x: float) -> float:
    """``sum_{p <= x} 1/p``."""
    return math.fsum(1.0 / _primes_for(x))


def mertens_product(x: float) -> float:
    """``prod_{p <= x} (1 - 1/p)``."""
    return math.exp(math.fsum(np.log1p(-1.0 / _primes_for(x))))


def mertens_product_power(x: float, j: float) -> float:
    """``prod_{p <= x} (1 - p^-j)`` for ``j >= 2``."""
    if j < 2:
        raise DomainError("j must be >= 2")
    return math.exp(math.fsum(np.log1p(-(_primes_for(x) ** -float(j)))))


def mertens_product_chi(x: float, j: float) -> float:
    """``prod_{p <= x} (1 - chi_1(p) p^-j)`` for ``j >= 1``."""
    if j < 1:
        raise DomainError("j must be >= 1")
    p = _primes_for(x)
    chi = np.where(p.astype(np.int64) % 4 == 1, 1.0, -1.0)
    chi[p == 2] = 0.0
    return math.exp(math.fsum(np.log1p(-chi * p ** -float(j))))


# ---------------------------------------------------------------------------
# Dirichlet series versus Euler product
# ---------------------------------------------------------------------------


class SeriesCheck(NamedTuple):
    lhs: float
    rhs: float
    gap: float
    lhs_tail: float
    rhs_tail: float


def _g_product(k: int, delta: float, s: float, z: float, P: int) -> Tuple[float, float]:
    """``prod_{p <= P}`` of the local factor of ``F / zeta(s + z - delta z)``.

    Returns the product and a bound on the relative error from ``p > P``.
    """
    primes = arith.small_primes(P)
    pf = primes.astype(np.float64)
    u = _log_u(primes, k)
    sig = s + (1.0 - delta) * z
    # factor - 1 = p^-sig (e^{z u} - 1)
    w = pf**-sig * np.expm1(z * u)
    logs = np.log1p(w)
    zabs = abs(z)
    # |e^{zu}-1| <= 2|z|/(p-1) e^{2|z|/(p-1)}: sum over n > P of n^-(sig+1)
    c = 2 * zabs * math.exp(2 * zabs / (P - 1)) * P / (P - 1)
    tail = math.expm1(c * P**-sig / sig)
    return math.exp(math.fsum(logs)), tail


def dirichlet_series_check(k: int, beta, s: float, z: float, N: int, primes_cut: int = 10**6) -> SeriesCheck:
    """Compare ``sum_{n <= N} n^(-s + beta z) Phi_k(n)^-z`` with its Euler product.

    The right side is the product of local factors over ``p <= primes_cut``
    times ``zeta(s + z - delta z)``.
    """
    from fractions import Fraction

    from .totient import iter_segments

    beta = Fraction(beta)
    delta = float(beta - (k - 1))
    s, z = float(s), float(z)
    sig = s + (1.0 - delta) * z
    if not sig > 1.0:
        raise DomainError("(s, z) outside the region of absolute convergence")
    if not (1 <= N <= 10**7):
        raise CapacityError("N must be in [1, 10^7]")
    if z < 0:
        raise DomainError("z must be >= 0")
    parts = []
    edge = 0.0
    for seg in iter_segments(N, k):
        ln = np.log(seg.n.astype(np.float64))
        terms = np.exp(-sig * ln - z * seg.log_ratio)
        parts.append(math.fsum(terms))
        top = seg.n > N // 2
        if top.any():
            edge = max(edge, float(np.max(terms[top] * np.exp(sig * ln[top]))))
    lhs = math.fsum(parts)
    lhs_tail = edge * N ** (1.0 - sig) / (sig - 1.0)
    g, g_tail = _g_product(k, delta, s, z, primes_cut)
    zeta_arg = s + z - delta * z
    rhs = g * zeta_real(zeta_arg)
    return SeriesCheck(lhs, rhs, abs(lhs - rhs), lhs_tail, g_tail * abs(rhs))
