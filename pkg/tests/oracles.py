"""Slow, independent reference implementations used only by the tests."""

import math
from fractions import Fraction


def trial_factor(n):
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def naive_primes(limit):
    return [p for p in range(2, limit + 1) if all(p % d for d in range(2, math.isqrt(p) + 1))]


def gcd_phi(n):
    return sum(1 for a in range(1, n + 1) if math.gcd(a, n) == 1)


def phi_sieve(N):
    ph = list(range(N + 1))
    for p in range(2, N + 1):
        if ph[p] == p:
            for m in range(p, N + 1, p):
                ph[m] -= ph[m] // p
    return ph


def ratio_k(n, k):
    """Phi_k(n) / n^k from the distinct primes of n, as a Fraction."""
    v = Fraction(1)
    for p, _ in trial_factor(n):
        v *= 1 - Fraction(1, p)
        if k % 2 == 0 and p > 2:
            eps = 1 if k % 4 == 0 or p % 4 == 1 else -1
            v *= 1 - Fraction(eps, p ** (k // 2))
    return v
