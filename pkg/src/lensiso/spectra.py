"""Comparison polynomials H^p and profile comparison.

Two lens spaces with the same q and n have the same closed/coclosed p-form
spectrum exactly when their H^p agree.  H^p is built from the pair-count
matrices of each divisor level, each level's bracket polynomial multiplied
by cyclotomic factors so that everything is an honest Laurent polynomial.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .chartables import GeneratorChoice, PairCountMatrix, count_matrices_for_shape
from .numtheory import QShape, classify_shape, cyclotomic
from .polynomial import LaurentPoly, mul, pow, substitute_power

__all__ = [
    "SpectralProfile",
    "MatchReport",
    "bracket_poly",
    "level_multipliers",
    "build_profile",
    "profile_from_matrices",
    "common_denominator",
    "compare_profiles",
    "runs_of",
    "poly_digest",
]


def bracket_poly(M, p: int, k: int) -> LaurentPoly:
    """The double sum over (a, b) of (-1)^(a+b) (z^(a-b) - z^(a+b+2)) M[a][p-b].

    Written as the two sums grouped by the exponent c, so each coefficient
    is a short diagonal sum of M.
    """
    entries = M.entries if isinstance(M, PairCountMatrix) else M
    rows = 2 * k + 1
    if len(entries) != rows:
        raise ValueError(f"matrix has {len(entries)} rows, expected 2k+1 = {rows}")
    ncols = len(entries[0])
    if p < 0 or p >= ncols:
        raise ValueError(f"degree {p} outside the matrix column range 0..{ncols - 1}")
    lo = -p
    out = [0] * (2 * k + 2 * p + 3)
    for c in range(-p, 2 * k + 1):
        s = 0
        for a in range(max(0, c), min(2 * k, c + p) + 1):
            b = p - a + c
            assert 0 <= b < ncols, "beta index out of range"
            s += entries[a][b]
        out[c - lo] += s if c % 2 == 0 else -s
    for c in range(2, 2 * k + p + 3):
        s = 0
        for a in range(max(0, c - 2 - p), min(2 * k, c - 2) + 1):
            b = p + 2 + a - c
            assert 0 <= b < ncols, "beta index out of range"
            s += entries[a][b]
        out[c - lo] += -s if c % 2 == 0 else s
    return LaurentPoly(lo, [int(x) for x in out])


@lru_cache(maxsize=64)
def level_multipliers(shape: QShape) -> dict[str, LaurentPoly]:
    """Cyclotomic multiplier attached to each level's bracket.

    The keys are the combinations of pair-count matrices the brackets are
    taken of: ``"q-q1-q2"`` means C^q - C^q1 - C^q2 and so on.
    """
    q = shape.q
    if shape.kind == "prime":
        return {"q": LaurentPoly(0, [1])}
    q1 = shape.q1
    psi1 = cyclotomic(q1)
    if shape.kind == "semiprime":
        q2 = shape.q2
        psi2 = cyclotomic(q2)
        a = pow(psi1, q2 - 1)
        b = pow(psi2, q1 - 1)
        psiq = cyclotomic(q)
        return {"q-q1-q2": mul(a, b), "q1": mul(psiq, a), "q2": mul(psiq, b)}
    if shape.kind == "prime_square":
        return {"q1^2-q1": pow(psi1, q1), "q1": substitute_power(psi1, q1)}
    # prime cube
    s1 = pow(substitute_power(psi1, q1), q1)      # Psi_{q1^2}(z)^{q1}
    s2 = substitute_power(psi1, q1 * q1)          # Psi_{q1^3}(z)
    s0 = pow(psi1, q1 * q1)                       # Psi_{q1}(z)^{q1^2}
    return {"q1^3-q1^2": mul(s1, s0), "q1^2-q1": mul(s2, s0), "q1": mul(s2, s1)}


def _combined_matrices(mats: dict[str, PairCountMatrix], shape: QShape) -> dict[str, np.ndarray]:
    if shape.kind == "prime":
        return {"q": mats["q"].entries}
    if shape.kind == "semiprime":
        e, e1, e2 = mats["q"].entries, mats["q1"].entries, mats["q2"].entries
        return {"q-q1-q2": e - e1 - e2, "q1": e1, "q2": e2}
    if shape.kind == "prime_square":
        e, e1 = mats["q1^2"].entries, mats["q1"].entries
        return {"q1^2-q1": e - e1, "q1": e1}
    e3, e2, e1 = mats["q1^3"].entries, mats["q1^2"].entries, mats["q1"].entries
    # units of Z/q1^3 contribute C^{q1^3} - C^{q1^2}: the full sum over t minus
    # the sum over all multiples of q1 (which already contains those of q1^2)
    return {"q1^3-q1^2": e3 - e2, "q1^2-q1": e2 - e1, "q1": e1}


@dataclass(frozen=True)
class SpectralProfile:
    """H^p for p = 0..n of one generator choice."""

    choice: GeneratorChoice
    shape: QShape
    polys: tuple[LaurentPoly, ...]

    @property
    def n(self) -> int:
        return self.choice.n

    def __len__(self) -> int:
        return len(self.polys)

    def __getitem__(self, p: int) -> LaurentPoly:
        return self.polys[p]

    def digests(self) -> list[str]:
        return [poly_digest(h) for h in self.polys]


def poly_digest(h: LaurentPoly) -> str:
    """Stable 128-bit digest of a normalized polynomial."""
    data = f"{h.min_exp}:{','.join(map(str, h.coeffs))}".encode()
    return hashlib.blake2b(data, digest_size=16).hexdigest()


def build_profile(choice: GeneratorChoice, shape: QShape | None = None,
                  degrees=None) -> SpectralProfile:
    """Compute H^p for every p in ``degrees`` (default 0..n)."""
    if shape is None:
        shape = classify_shape(choice.q)
    if not shape.supported:
        raise ValueError(f"unsupported q-shape {shape}")
    return profile_from_matrices(choice, shape, count_matrices_for_shape(choice, shape), degrees)


def profile_from_matrices(choice: GeneratorChoice, shape: QShape,
                          mats: dict[str, PairCountMatrix], degrees=None) -> SpectralProfile:
    """H^p from already built pair-count matrices (keyed by level label)."""
    combos = _combined_matrices(mats, shape)
    mult = level_multipliers(shape)
    k, n = choice.k, choice.n
    if degrees is None:
        degrees = range(n + 1)
    polys = []
    for p in degrees:
        if not 0 <= p <= n:
            raise ValueError(f"degree {p} outside 0..{n}")
        total = LaurentPoly()
        for key, m in combos.items():
            total = total + mul(mult[key], bracket_poly(m, p, k))
        polys.append(total)
    return SpectralProfile(choice, shape, tuple(polys))


@lru_cache(maxsize=64)
def common_denominator(shape: QShape) -> LaurentPoly:
    """D(z) with H_A - H_B = q * D(z) * (F_A - F_B).

    It is Psi_q times the multiplier of the unit-class bracket.
    """
    first = next(iter(level_multipliers(shape).values()))
    return mul(cyclotomic(shape.q), first)


def runs_of(flags) -> list[tuple[int, int]]:
    """Maximal [start, end] intervals of True positions."""
    runs = []
    start = None
    for i, f in enumerate(flags):
        if f and start is None:
            start = i
        elif not f and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(flags) - 1))
    return runs


@dataclass(frozen=True)
class MatchReport:
    """Degree-by-degree comparison of two profiles.

    ``choice_a`` and ``choice_b`` are the +/-S sets, stored in sorted order
    so the report does not depend on argument order.
    """

    q: int
    k: int
    choice_a: tuple[int, ...]
    choice_b: tuple[int, ...]
    equal: tuple[bool, ...]

    @property
    def runs(self) -> list[tuple[int, int]]:
        return runs_of(self.equal)

    @property
    def equal_degrees(self) -> list[int]:
        return [p for p, e in enumerate(self.equal) if e]

    @property
    def form_degrees(self) -> list[int]:
        """Degrees p whose full p-form spectra agree: 0 if H^0 agrees, and
        p >= 1 if H^p and H^(p-1) both agree."""
        e = self.equal
        return [p for p in range(len(e)) if e[p] and (p == 0 or e[p - 1])]

    def p_form_isospectral(self, p: int) -> bool:
        """Same p-form spectrum: H agrees at p and at p - 1."""
        if p < 1 or p >= len(self.equal):
            raise ValueError(f"p must lie in 1..{len(self.equal) - 1}")
        return self.equal[p] and self.equal[p - 1]

    @classmethod
    def make(cls, q: int, k: int, a, b, equal) -> "MatchReport":
        a, b = tuple(a), tuple(b)
        if b < a:
            a, b = b, a
        return cls(q, k, a, b, tuple(bool(e) for e in equal))


def compare_profiles(a: SpectralProfile, b: SpectralProfile) -> MatchReport:
    ca, cb = a.choice, b.choice
    if (ca.q, ca.k, ca.n) != (cb.q, cb.k, cb.n) or len(a) != len(b):
        raise ValueError("profiles differ in q, k or n and cannot be compared")
    equal = [x == y for x, y in zip(a.polys, b.polys)]
    return MatchReport.make(ca.q, ca.k, ca.s_pm, cb.s_pm, equal)
