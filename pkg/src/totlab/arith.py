"""Primes, factorization, the character chi_1 mod 4, primorials and constants.

Everything here is pure. Sieve output is numpy ``int64``; factorizations are
plain lists of ``(prime, exponent)`` tuples.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from .errors import ArgumentError, CapacityError

PRIMES_CAP = 10**9
SPF_CAP = 10**12
FACTOR_CAP = 2**63
PRIMORIAL_CAP = 10**5
SEGMENT_SIZE = 2**20

# Trial division bound before switching to Miller-Rabin / Pollard-Brent.
TRIAL_BOUND = 4096

GAMMA = Decimal("0.577215664901532860606512090082402431042159335939923598805767")
MEISSEL_MERTENS = Decimal("0.261497212847642783755426838608695859051566648261199206192064")

Factorization = List[Tuple[int, int]]


@dataclass(frozen=True)
class Constants:
    """Numeric constants used by the analytic and regime code.

    ``kappa`` defaults to ``exp(1 + meissel_mertens)``; pass a value to override.
    """

    gamma: Decimal = GAMMA
    meissel_mertens: Decimal = MEISSEL_MERTENS
    kappa: Optional[Decimal] = field(default=None)

    def __post_init__(self) -> None:
        if self.kappa is None:
            with localcontext() as ctx:
                ctx.prec = 60
                object.__setattr__(self, "kappa", (1 + self.meissel_mertens).exp())
        elif not isinstance(self.kappa, Decimal):
            object.__setattr__(self, "kappa", Decimal(str(self.kappa)))

    @property
    def gamma_f(self) -> float:
        return float(self.gamma)

    @property
    def b0_f(self) -> float:
        return float(self.meissel_mertens)

    @property
    def kappa_f(self) -> float:
        return float(self.kappa)


DEFAULT_CONSTANTS = Constants()


# ---------------------------------------------------------------------------
# sieves
# ---------------------------------------------------------------------------


@lru_cache(maxsize=8)
def _prime_table(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    # odd-only sieve: index i <-> 2i+1
    size = (limit - 1) // 2 + 1
    odd = np.ones(size, dtype=bool)
    odd[0] = False
    for i in range(1, (math.isqrt(limit) - 1) // 2 + 1):
        if odd[i]:
            p = 2 * i + 1
            odd[p * p // 2 :: p] = False
    primes = 2 * np.flatnonzero(odd).astype(np.int64) + 1
    out = np.concatenate([np.array([2], dtype=np.int64), primes])
    out.setflags(write=False)
    return out


def primes_up_to(limit: int) -> np.ndarray:
    """Return all primes ``p <= limit`` in ascending order.

    Raises:
        CapacityError: if ``limit`` exceeds ``PRIMES_CAP``.
    """
    limit = int(limit)
    if limit < 0:
        raise ArgumentError("limit must be non-negative")
    if limit > PRIMES_CAP:
        raise CapacityError(f"primes_up_to limited to {PRIMES_CAP}, got {limit}")
    table = _prime_table(_round_limit(limit))
    return table[: np.searchsorted(table, limit, side="right")].copy()


def _round_limit(limit: int) -> int:
    # share cached tables between nearby limits
    if limit <= 2**16:
        return 2**16
    return 1 << (limit - 1).bit_length()


def small_primes(limit: int) -> np.ndarray:
    """Read-only cached prime table covering at least ``[2, limit]``."""
    table = _prime_table(_round_limit(int(limit)))
    return table[: np.searchsorted(table, limit, side="right")]


def spf_sieve_segment(lo: int, hi: int, segment_size: int = SEGMENT_SIZE) -> np.ndarray:
    """Smallest prime factor of every ``n`` in ``[lo, hi]`` (inclusive).

    Entry ``i`` of the result belongs to ``n = lo + i``.
    """
    lo, hi = int(lo), int(hi)
    if lo < 2:
        raise ArgumentError("lo must be >= 2")
    if hi < lo:
        raise ArgumentError(f"inverted range [{lo}, {hi}]")
    if hi > SPF_CAP:
        raise CapacityError(f"spf sieve limited to {SPF_CAP}")
    if hi - lo + 1 > segment_size:
        raise CapacityError(f"segment longer than {segment_size}")
    spf = np.zeros(hi - lo + 1, dtype=np.int64)
    for p in small_primes(math.isqrt(hi)):
        p = int(p)
        start = max(p * p, ((lo + p - 1) // p) * p)
        if start > hi:
            continue
        view = spf[start - lo :: p]
        view[view == 0] = p
    rest = spf == 0
    spf[rest] = np.arange(lo, hi + 1, dtype=np.int64)[rest]
    return spf


# ---------------------------------------------------------------------------
# primality and factorization
# ---------------------------------------------------------------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for ``n < 3.3 * 10**24``."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _split(n: int, out: dict, rng: random.Random) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_brent(n, rng)
    _split(d, out, rng)
    _split(n // d, out, rng)


def factorize(n: int) -> Factorization:
    """Prime factorization of ``1 <= n < 2**63`` as ascending ``(p, e)`` pairs."""
    n = int(n)
    if n < 1:
        raise ArgumentError("factorize needs n >= 1")
    if n >= FACTOR_CAP:
        raise CapacityError("factorize supports n < 2**63")
    found: dict = {}
    for p in small_primes(TRIAL_BOUND):
        p = int(p)
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            found[p] = e
    if n > 1:
        # deterministic seed keeps runs reproducible
        _split(n, found, random.Random(n))
    return sorted(found.items())


def factorize_with_spf(n: int, spf: np.ndarray, offset: int = 0) -> Factorization:
    """Factor ``n`` by repeated lookup in an spf table covering ``[offset, n]``."""
    out: Factorization = []
    while n > 1:
        if offset <= n < offset + len(spf):
            p = int(spf[n - offset])
        else:
            p = factorize(n)[0][0]
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return out


# ---------------------------------------------------------------------------
# characters, primorials
# ---------------------------------------------------------------------------


def chi1(n: int) -> int:
    """The non-principal Dirichlet character modulo 4."""
    r = n % 4
    if r == 1:
        return 1
    if r == 3:
        return -1
    return 0


def nth_prime_bound(s: int) -> int:
    """An upper bound for the ``s``-th prime (Rosser; valid for ``s >= 6``)."""
    if s < 6:
        return 13
    return int(s * (math.log(s) + math.log(math.log(s)))) + 1


def first_primes(s: int) -> np.ndarray:
    """The first ``s`` primes."""
    table = small_primes(nth_prime_bound(s))
    return table[:s]


def _balanced_product(values: List[int]) -> int:
    while len(values) > 1:
        nxt = [values[i] * values[i + 1] for i in range(0, len(values) - 1, 2)]
        if len(values) % 2:
            nxt.append(values[-1])
        values = nxt
    return values[0] if values else 1


def primorial(s: int) -> int:
    """Product of the first ``s`` primes (``1`` for ``s == 0``)."""
    s = int(s)
    if s < 0:
        raise ArgumentError("s must be non-negative")
    if s > PRIMORIAL_CAP:
        raise CapacityError(f"primorial limited to s <= {PRIMORIAL_CAP}")
    return _balanced_product([int(p) for p in first_primes(s)])
