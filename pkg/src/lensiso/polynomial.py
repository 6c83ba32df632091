"""Exact dense Laurent polynomials over the integers."""

from __future__ import annotations

from typing import Iterable, Sequence

__all__ = ["LaurentPoly", "add", "sub", "mul", "pow", "substitute_power", "ZERO", "ONE"]


class LaurentPoly:
    """Dense Laurent polynomial ``sum_i coeffs[i] * z**(min_exp + i)``.

    Instances are immutable and always normalized: the first and last stored
    coefficients are nonzero, and the zero polynomial is ``(min_exp=0, ())``.
    Coefficients are Python ints, so arithmetic is exact at any size.
    """

    __slots__ = ("min_exp", "coeffs", "_hash")

    def __init__(self, min_exp: int = 0, coeffs: Iterable[int] = ()):
        cs = [int(c) for c in coeffs]
        lo = 0
        while lo < len(cs) and cs[lo] == 0:
            lo += 1
        hi = len(cs)
        while hi > lo and cs[hi - 1] == 0:
            hi -= 1
        if lo == hi:
            object.__setattr__(self, "min_exp", 0)
            object.__setattr__(self, "coeffs", ())
        else:
            object.__setattr__(self, "min_exp", int(min_exp) + lo)
            object.__setattr__(self, "coeffs", tuple(cs[lo:hi]))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentPoly is immutable")

    def __reduce__(self):
        return (LaurentPoly, (self.min_exp, self.coeffs))

    @classmethod
    def from_dict(cls, terms: dict[int, int]) -> "LaurentPoly":
        terms = {e: c for e, c in terms.items() if c}
        if not terms:
            return cls()
        lo, hi = min(terms), max(terms)
        cs = [0] * (hi - lo + 1)
        for e, c in terms.items():
            cs[e - lo] = c
        return cls(lo, cs)

    @classmethod
    def monomial(cls, exp: int, coeff: int = 1) -> "LaurentPoly":
        return cls(exp, [coeff])

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def max_exp(self) -> int:
        """Highest exponent; -1 for the zero polynomial by convention."""
        return self.min_exp + len(self.coeffs) - 1 if self.coeffs else -1

    def degree(self) -> int:
        return self.max_exp

    def coeff(self, exp: int) -> int:
        i = exp - self.min_exp
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def terms(self) -> dict[int, int]:
        return {self.min_exp + i: c for i, c in enumerate(self.coeffs) if c}

    def dense(self) -> list[int]:
        """Coefficients from exponent 0 upward (needs ``min_exp >= 0``)."""
        if self.min_exp < 0:
            raise ValueError("dense() needs a polynomial without negative exponents")
        return [0] * self.min_exp + list(self.coeffs) if self.coeffs else []

    def __call__(self, z):
        if not self.coeffs:
            return 0 * z
        acc = 0 * z
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc * z**self.min_exp

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = LaurentPoly(0, [other])
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.min_exp == other.min_exp and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.min_exp, self.coeffs))
            object.__setattr__(self, "_hash", h)
        return h

    def __add__(self, other):
        return add(self, _coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, _coerce(other))

    def __rsub__(self, other):
        return sub(_coerce(other), self)

    def __neg__(self):
        return LaurentPoly(self.min_exp, [-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, int):
            return LaurentPoly(self.min_exp, [other * c for c in self.coeffs])
        return mul(self, _coerce(other))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return pow(self, e)

    def __repr__(self) -> str:
        return f"LaurentPoly({self.min_exp}, {list(self.coeffs)})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for e, c in sorted(self.terms().items()):
            if e == 0:
                mono = f"{c}"
            else:
                zpart = "z" if e == 1 else f"z^{e}"
                mono = zpart if c == 1 else f"-{zpart}" if c == -1 else f"{c}*{zpart}"
            parts.append(mono)
        return " + ".join(parts).replace("+ -", "- ")


def _coerce(x) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, int):
        return LaurentPoly(0, [x])
    raise TypeError(f"cannot use {type(x).__name__} as LaurentPoly")


ZERO = LaurentPoly()
ONE = LaurentPoly(0, [1])


def _combine(a: LaurentPoly, b: LaurentPoly, sign: int) -> LaurentPoly:
    if not b.coeffs:
        return a
    if not a.coeffs:
        return b if sign == 1 else -b
    lo = min(a.min_exp, b.min_exp)
    hi = max(a.max_exp, b.max_exp)
    out = [0] * (hi - lo + 1)
    off = a.min_exp - lo
    for i, c in enumerate(a.coeffs):
        out[off + i] = c
    off = b.min_exp - lo
    if sign == 1:
        for i, c in enumerate(b.coeffs):
            out[off + i] += c
    else:
        for i, c in enumerate(b.coeffs):
            out[off + i] -= c
    return LaurentPoly(lo, out)


def add(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return _combine(a, b, 1)


def sub(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return _combine(a, b, -1)


def mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Schoolbook product."""
    if not a.coeffs or not b.coeffs:
        return ZERO
    ac, bc = a.coeffs, b.coeffs
    if len(ac) < len(bc):
        ac, bc = bc, ac
    out = [0] * (len(ac) + len(bc) - 1)
    for j, y in enumerate(bc):
        if y:
            for i, x in enumerate(ac):
                out[i + j] += x * y
    return LaurentPoly(a.min_exp + b.min_exp, out)


def pow(a: LaurentPoly, e: int) -> LaurentPoly:  # noqa: A001 - mirrors the ring operation name
    if e < 0:
        raise ValueError("negative powers are not polynomials")
    result = ONE
    base = a
    while e:
        if e & 1:
            result = mul(result, base)
        e >>= 1
        if e:
            base = mul(base, base)
    return result


def substitute_power(a: LaurentPoly, m: int) -> LaurentPoly:
    """Substitute z -> z**m."""
    if m < 1:
        raise ValueError("substitute_power needs m >= 1")
    if a.min_exp < 0:
        raise ValueError("substitute_power is only defined for ordinary polynomials")
    if not a.coeffs or m == 1:
        return a
    out = [0] * ((len(a.coeffs) - 1) * m + 1)
    out[::m] = a.coeffs
    return LaurentPoly(a.min_exp * m, out)


def linear_combination(terms: Sequence[tuple[int, LaurentPoly]]) -> LaurentPoly:
    """sum of c * p over ``(c, p)`` pairs."""
    acc: dict[int, int] = {}
    for c, p in terms:
        if not c:
            continue
        for i, x in enumerate(p.coeffs):
            e = p.min_exp + i
            acc[e] = acc.get(e, 0) + c * x
    return LaurentPoly.from_dict(acc)
