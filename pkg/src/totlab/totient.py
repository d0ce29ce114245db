"""The generalized totient Phi_k(n) and its companions phi(n), J_k(n), alpha_k.

Phi_k(n) counts k-tuples over Z/nZ whose sum of squares is a unit mod n. It
is multiplicative with

    Phi_k(n) = n^(k-1) phi(n)                            (k odd)
    Phi_k(n) = n^(k-1) phi(n) prod_{p | n, p > 2} alpha_k(p)   (k even)

so ``Phi_k(n) / n^k`` depends only on the set of primes dividing ``n``. The
bulk routines exploit that: they accumulate ``log(1 - 1/p)`` and
``log alpha_k(p)`` per prime divisor over sieve segments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Tuple

import numpy as np

from . import arith
from .arith import Factorization
from .errors import ArgumentError, CapacityError

BRUTE_COST_CAP = 10**8
RANGE_CAP = 10**8


@dataclass(frozen=True)
class TotientParams:
    """``(k, beta)`` with the shifted exponent ``delta = beta - (k - 1)``."""

    k: int
    beta: Fraction

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ArgumentError("k must be >= 1")
        object.__setattr__(self, "beta", Fraction(self.beta))

    @property
    def delta(self) -> Fraction:
        return self.beta - (self.k - 1)


@dataclass(frozen=True)
class TotientValue:
    """One entry of :func:`phi_k_range`.

    ``log_ratio`` is ``ln Phi_k(n) - k ln n``. ``phi_k`` is computed exactly
    from a factorization on first access unless it was supplied.
    """

    n: int
    k: int
    log_ratio: float
    exact: Optional[int] = None

    @property
    def phi_k(self) -> int:
        if self.exact is not None:
            return self.exact
        return phi_k(self.n, self.k)


def _check_k(k: int) -> int:
    k = int(k)
    if k < 1:
        raise ArgumentError("k must be a positive integer")
    return k


def alpha_k(p: int, k: int) -> Fraction:
    """Local factor ``1 - (-1)^(k(p-1)/4) / p^(k/2)`` at an odd prime ``p``.

    At ``p = 2`` the factor is 1 by definition and callers handle it.
    """
    k = _check_k(k)
    if k % 2:
        raise ArgumentError("alpha_k is only defined for even k")
    if p < 3 or p % 2 == 0:
        raise ArgumentError("alpha_k needs an odd prime")
    sign = -1 if (k * (p - 1) // 4) % 2 else 1
    return 1 - Fraction(sign, p ** (k // 2))


def alpha_sign(p: int, k: int) -> int:
    """``eps`` in ``alpha_k(p) = 1 - eps / p^(k/2)``; 0 when alpha_k(p) = 1."""
    if k % 2 or p == 2:
        return 0
    if k % 4 == 0:
        return 1
    return arith.chi1(p)


def phi_k_from_factorization(fac: Factorization, k: int) -> int:
    out = 1
    h = k // 2
    for p, e in fac:
        eps = alpha_sign(p, k)
        if eps == 0:
            out *= p ** (e * k - 1) * (p - 1)
        else:
            # p^(ek-1-h) (p-1) (p^h - eps); ek-1-h >= h-1 >= 0
            out *= p ** (e * k - 1 - h) * (p - 1) * (p**h - eps)
    return out


def phi_k(n: int, k: int) -> int:
    """Phi_k(n) from the explicit product formula."""
    k = _check_k(k)
    if n < 1:
        raise ArgumentError("n must be positive")
    return phi_k_from_factorization(arith.factorize(n), k)


def phi_k_brute(n: int, k: int) -> int:
    """Count tuples in ``(Z/nZ)^k`` whose sum of squares is coprime to ``n``.

    The enumeration runs coordinate by coordinate: after ``j`` coordinates a
    table holds how many partial tuples reach each residue of the partial sum
    of squares. It visits the same ``n^k`` tuples as the nested loop, grouped
    by residue.
    """
    k = _check_k(k)
    if n < 1:
        raise ArgumentError("n must be positive")
    if n**k > BRUTE_COST_CAP:
        raise CapacityError(f"n^k = {n**k} exceeds brute-force cap {BRUTE_COST_CAP}")
    squares = [(x * x) % n for x in range(n)]
    reach = [0] * n
    reach[0] = 1
    for _ in range(k):
        nxt = [0] * n
        for r, cnt in enumerate(reach):
            if cnt:
                for sq in squares:
                    nxt[(r + sq) % n] += cnt
        reach = nxt
    return sum(cnt for r, cnt in enumerate(reach) if math.gcd(r, n) == 1)


def phi_k_literal(n: int, k: int) -> int:
    """Nested-loop count over all ``n^k`` tuples. Only for tiny inputs."""
    from itertools import product

    if n**k > 10**6:
        raise CapacityError("literal enumeration limited to n^k <= 10^6")
    return sum(
        1 for t in product(range(n), repeat=k) if math.gcd(sum(x * x for x in t), n) == 1
    )


def euler_phi(n: int) -> int:
    if n < 1:
        raise ArgumentError("n must be positive")
    out = 1
    for p, e in arith.factorize(n):
        out *= p ** (e - 1) * (p - 1)
    return out


def jordan_j(n: int, k: int) -> int:
    """Jordan's totient ``n^k prod_{p | n} (1 - p^-k)``."""
    k = _check_k(k)
    if n < 1:
        raise ArgumentError("n must be positive")
    out = 1
    for p, e in arith.factorize(n):
        out *= p ** (k * (e - 1)) * (p**k - 1)
    return out


def alpha_product(fac: Factorization, k: int) -> Fraction:
    """``alpha_k(n)`` as an exact rational (1 for odd ``k``)."""
    out = Fraction(1)
    if k % 2:
        return out
    for p, _ in fac:
        if p > 2:
            out *= alpha_k(p, k)
    return out


# ---------------------------------------------------------------------------
# bulk evaluation over segments
# ---------------------------------------------------------------------------


def log_alpha_primes(primes: np.ndarray, k: int) -> np.ndarray:
    """``ln alpha_k(p)`` for an array of primes (0 where alpha is 1)."""
    primes = np.asarray(primes, dtype=np.int64)
    out = np.zeros(primes.shape, dtype=np.float64)
    if k % 2:
        return out
    odd = primes > 2
    h = k // 2
    pf = primes[odd].astype(np.float64)
    if k % 4 == 0:
        eps = np.ones_like(pf)
    else:
        eps = np.where(primes[odd] % 4 == 1, 1.0, -1.0)
    out[odd] = np.log1p(-eps * pf ** (-float(h)))
    return out


@dataclass
class Segment:
    """Per-n logarithmic data for ``n`` in ``[lo, hi]``.

    ``log_phi`` is ``sum ln(1 - 1/p)`` and ``log_alpha`` is ``sum ln alpha_k(p)``
    over the distinct primes ``p | n``; their sum is ``ln(Phi_k(n) / n^k)``.
    ``phi`` holds exact Euler phi values when requested.
    """

    lo: int
    hi: int
    n: np.ndarray
    log_phi: np.ndarray
    log_alpha: np.ndarray
    phi: Optional[np.ndarray] = None

    @property
    def log_ratio(self) -> np.ndarray:
        return self.log_phi + self.log_alpha


def sieve_segment(lo: int, hi: int, k: int, with_phi: bool = False) -> Segment:
    """Accumulate prime-divisor data over ``[lo, hi]`` (``lo >= 1``)."""
    if lo < 1 or hi < lo:
        raise ArgumentError(f"bad segment [{lo}, {hi}]")
    n = np.arange(lo, hi + 1, dtype=np.int64)
    rem = n.copy()
    log_phi = np.zeros(n.shape, dtype=np.float64)
    log_alpha = np.zeros(n.shape, dtype=np.float64)
    phi = n.copy() if with_phi else None
    primes = arith.small_primes(math.isqrt(hi))
    la = log_alpha_primes(primes, k)
    for p, lap in zip(primes.tolist(), la.tolist()):
        start = ((lo + p - 1) // p) * p
        if start > hi:
            continue
        sl = slice(start - lo, None, p)
        log_phi[sl] += math.log1p(-1.0 / p)
        if lap:
            log_alpha[sl] += lap
        if phi is not None:
            phi[sl] = phi[sl] // p * (p - 1)
        pk = p
        while pk <= hi:
            s = ((lo + pk - 1) // pk) * pk
            if s > hi:
                break
            rem[s - lo :: pk] //= p
            pk *= p
    big = rem > 1
    if big.any():
        q = rem[big]
        log_phi[big] += np.log1p(-1.0 / q.astype(np.float64))
        log_alpha[big] += log_alpha_primes(q, k)
        if phi is not None:
            phi[big] = phi[big] // q * (q - 1)
    return Segment(lo, hi, n, log_phi, log_alpha, phi)


def segments(x: int, size: int = arith.SEGMENT_SIZE, start: int = 1) -> Iterator[Tuple[int, int]]:
    lo = start
    while lo <= x:
        hi = min(x, lo + size - 1)
        yield lo, hi
        lo = hi + 1


def iter_segments(
    x: int, k: int, with_phi: bool = False, size: int = arith.SEGMENT_SIZE, threads: int = 1, start: int = 1
) -> Iterator[Segment]:
    """Sieve ``[start, x]`` segment by segment, yielded in ascending order.

    With ``threads > 1`` segments are computed by a thread pool; the yield
    order is unchanged.
    """
    bounds = list(segments(x, size, start))
    if threads <= 1 or len(bounds) == 1:
        for lo, hi in bounds:
            yield sieve_segment(lo, hi, k, with_phi)
        return
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads) as pool:
        yield from pool.map(lambda b: sieve_segment(b[0], b[1], k, with_phi), bounds)


def phi_k_range(x: int, k: int, exact: bool = False, threads: int = 1) -> Iterator[TotientValue]:
    """Stream :class:`TotientValue` for ``n = 1..x`` in ascending order.

    With ``exact=True`` every entry carries ``Phi_k(n)`` computed from an
    smallest-prime-factor table; otherwise ``phi_k`` is computed lazily.
    """
    k = _check_k(k)
    if x < 1:
        raise ArgumentError("x must be >= 1")
    if x > RANGE_CAP:
        raise CapacityError(f"phi_k_range limited to x <= {RANGE_CAP}")
    for seg in iter_segments(x, k, threads=threads):
        spf = None
        if exact:
            lo2 = max(seg.lo, 2)
            spf = arith.spf_sieve_segment(lo2, seg.hi, seg.hi - lo2 + 1) if seg.hi >= 2 else None
        lr = seg.log_ratio
        for i, n in enumerate(seg.n.tolist()):
            value = None
            if exact:
                fac = [] if n == 1 else arith.factorize_with_spf(n, spf, max(seg.lo, 2))
                value = phi_k_from_factorization(fac, k)
            yield TotientValue(n, k, float(lr[i]), value)
