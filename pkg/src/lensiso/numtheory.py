"""Elementary number theory: totients, unit residues, q-shape classification
and cyclotomic polynomials."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd

from .polynomial import LaurentPoly

__all__ = [
    "QShape",
    "UnitSet",
    "factorize",
    "euler_phi",
    "classify_shape",
    "unit_residues",
    "cyclotomic",
    "divisors",
]


def factorize(q: int) -> dict[int, int]:
    """Prime factorization by trial division, ``{prime: exponent}``."""
    if q < 1:
        raise ValueError(f"factorize expects q >= 1, got {q}")
    out: dict[int, int] = {}
    d = 2
    while d * d <= q:
        while q % d == 0:
            out[d] = out.get(d, 0) + 1
            q //= d
        d += 1 if d == 2 else 2
    if q > 1:
        out[q] = out.get(q, 0) + 1
    return out


def divisors(q: int) -> list[int]:
    return sorted(d for d in range(1, q + 1) if q % d == 0)


def euler_phi(q: int) -> int:
    if q < 1:
        raise ValueError(f"euler_phi expects q >= 1, got {q}")
    result = q
    for p in factorize(q):
        result = result // p * (p - 1)
    return result


@dataclass(frozen=True)
class QShape:
    """Factor shape of q.

    ``kind`` is one of ``"prime"``, ``"prime_square"``, ``"prime_cube"``,
    ``"semiprime"`` or ``"unsupported"``.  ``primes`` holds q1 (and q2 for
    a semiprime, with q1 < q2).
    """

    kind: str
    q: int
    primes: tuple[int, ...] = ()

    @property
    def supported(self) -> bool:
        return self.kind != "unsupported"

    @property
    def q1(self) -> int:
        return self.primes[0]

    @property
    def q2(self) -> int:
        return self.primes[1]

    def reconstruct(self) -> int:
        if self.kind == "prime":
            return self.q1
        if self.kind == "prime_square":
            return self.q1**2
        if self.kind == "prime_cube":
            return self.q1**3
        if self.kind == "semiprime":
            return self.q1 * self.q2
        return self.q

    def label(self) -> str:
        if self.kind == "prime":
            return f"Prime({self.q1})"
        if self.kind == "prime_square":
            return f"PrimeSquare({self.q1})"
        if self.kind == "prime_cube":
            return f"PrimeCube({self.q1})"
        if self.kind == "semiprime":
            return f"Semiprime({self.q1}, {self.q2})"
        return f"Unsupported({self.q})"

    def __str__(self) -> str:
        return self.label()


def classify_shape(q: int, allow_even: bool = False) -> QShape:
    """Classify q into one of the supported factor shapes.

    A semiprime with the factor 2 (q = 2p) is only accepted when
    ``allow_even`` is set; the comparison polynomials are derived for odd
    prime factors.
    """
    if q < 1:
        raise ValueError(f"classify_shape expects q >= 1, got {q}")
    if q <= 2:
        return QShape("unsupported", q)
    f = factorize(q)
    primes = sorted(f)
    if len(primes) == 1:
        p, m = primes[0], f[primes[0]]
        kind = {1: "prime", 2: "prime_square", 3: "prime_cube"}.get(m)
        if kind is None:
            return QShape("unsupported", q)
        return QShape(kind, q, (p,))
    if len(primes) == 2 and f[primes[0]] == 1 and f[primes[1]] == 1:
        if primes[0] == 2 and not allow_even:
            return QShape("unsupported", q)
        return QShape("semiprime", q, tuple(primes))
    return QShape("unsupported", q)


@dataclass(frozen=True)
class UnitSet:
    """Residues 0 < t < q coprime to q, sorted ascending."""

    q: int
    residues: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.residues)

    def __iter__(self):
        return iter(self.residues)

    def __contains__(self, t) -> bool:
        return t in self.residues

    def half(self) -> tuple[int, ...]:
        """One representative per +/- pair: the residues below q/2."""
        return tuple(t for t in self.residues if 2 * t < self.q)


def unit_residues(q: int) -> UnitSet:
    if q < 3:
        raise ValueError(f"unit_residues needs q >= 3, got {q}")
    return UnitSet(q, tuple(t for t in range(1, q) if gcd(t, q) == 1))


@lru_cache(maxsize=None)
def cyclotomic(d: int) -> LaurentPoly:
    """Cyclotomic polynomial Psi_d with integer coefficients.

    Computed as (z^d - 1) divided by the product of Psi_e over proper
    divisors e of d.
    """
    if d < 1:
        raise ValueError(f"cyclotomic expects d >= 1, got {d}")
    num = [-1] + [0] * (d - 1) + [1]
    for e in divisors(d)[:-1]:
        num = _exact_div_monic(num, list(cyclotomic(e).coeffs))
    return LaurentPoly(0, num)


def _exact_div_monic(num: list[int], den: list[int]) -> list[int]:
    """Long division by a monic polynomial; the remainder must vanish."""
    num = list(num)
    dn = len(den) - 1
    if den[-1] != 1:
        raise ValueError("divisor must be monic")
    quot = [0] * (len(num) - dn)
    for i in range(len(quot) - 1, -1, -1):
        c = num[i + dn]
        quot[i] = c
        if c:
            for j, b in enumerate(den):
                num[i + j] -= c * b
    if any(num[:dn]):
        raise ArithmeticError("non-exact polynomial division")
    return quot
