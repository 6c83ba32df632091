"""Exact character data as subset-sum counts.

For a residue set X and modulus d, ``counts[a][j]`` is the number of
a-element subsets of X whose sum is congruent to j mod d.  Pairing the
table of +/-S with the table of +/-R gives the weighted pair counts that
feed the comparison polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, gcd

import numpy as np

from .numtheory import QShape, unit_residues

__all__ = [
    "InvalidChoiceError",
    "GeneratorChoice",
    "SubsetSumTable",
    "PairCountMatrix",
    "build_subset_sum_table",
    "fold_table",
    "pair_count_matrix",
    "count_matrices_for_shape",
    "level_specs",
]

# int64 is safe while every partial count stays below C(m, m//2) < 2**62
_INT64_SAFE = 2**62


class InvalidChoiceError(ValueError):
    """A residue set violates a lens-space invariant.

    ``residue`` is the offending value (or None) and ``invariant`` names the
    violated rule.
    """

    def __init__(self, message: str, residue: int | None = None, invariant: str = ""):
        super().__init__(message)
        self.residue = residue
        self.invariant = invariant


@dataclass(frozen=True)
class GeneratorChoice:
    """A lens-space generator, held as its +/- closed residue sets.

    ``s_pm`` has 2k elements, ``r_pm`` the remaining 2n units mod q.
    """

    q: int
    k: int
    s_pm: tuple[int, ...]
    r_pm: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.r_pm) // 2

    @property
    def s_half(self) -> tuple[int, ...]:
        return tuple(t for t in self.s_pm if 2 * t < self.q)

    @property
    def r_half(self) -> tuple[int, ...]:
        return tuple(t for t in self.r_pm if 2 * t < self.q)

    @classmethod
    def from_s(cls, q: int, s_pm) -> "GeneratorChoice":
        """Build from a full 2k-element +/- closure, validating it.

        Raises InvalidChoiceError naming the offending residue.
        """
        s_list = [int(x) for x in s_pm]
        seen = set()
        for t in s_list:
            if not 0 < t < q:
                raise InvalidChoiceError(
                    f"residue {t} is outside 1..{q - 1}", t, "range")
            if t in seen:
                raise InvalidChoiceError(f"residue {t} appears twice", t, "duplicate")
            seen.add(t)
        for t in s_list:
            if gcd(t, q) != 1:
                raise InvalidChoiceError(
                    f"residue {t} is not coprime to {q}", t, "coprime")
        for t in s_list:
            if q - t not in seen:
                raise InvalidChoiceError(
                    f"residue {t} has no partner {q - t} (set not closed under negation)",
                    t, "negation-closed")
        units = unit_residues(q).residues
        if len(s_list) == 0 or len(s_list) >= len(units):
            raise InvalidChoiceError(
                f"set size {len(s_list)} leaves no room for a nonempty complement "
                f"(phi({q}) = {len(units)})", None, "size")
        s = tuple(sorted(s_list))
        r = tuple(t for t in units if t not in seen)
        return cls(q, len(s) // 2, s, r)

    def scaled(self, u: int) -> "GeneratorChoice":
        """The choice u * (+/-S) mod q, for a unit u."""
        if gcd(u, self.q) != 1:
            raise ValueError(f"{u} is not a unit mod {self.q}")
        return GeneratorChoice.from_s(self.q, [(u * s) % self.q for s in self.s_pm])


@dataclass(frozen=True, eq=False)
class SubsetSumTable:
    """``counts[a, j]`` = #a-subsets of the source set with sum = j (mod modulus).

    ``counts`` is an object-dtype array of Python ints with shape
    ``(source_size + 1, modulus)``.
    """

    source_size: int
    modulus: int
    counts: np.ndarray = field(repr=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SubsetSumTable):
            return NotImplemented
        return (self.source_size == other.source_size and self.modulus == other.modulus
                and np.array_equal(self.counts, other.counts))

    def row(self, a: int) -> list[int]:
        return [int(x) for x in self.counts[a]]


@dataclass(frozen=True, eq=False)
class PairCountMatrix:
    """Weighted pair counts for one divisor level.

    ``entries[a, b] = weight * #{(A subset of +/-S, |A| = a; B subset of +/-R,
    |B| = b) : sum(A) + sum(B) = 0 mod modulus}``.  ``label`` names the level
    (``"q"``, ``"q1"``, ``"q2"``, ``"q1^2"``, ``"q1^3"``).
    """

    label: str
    modulus: int
    weight: int
    entries: np.ndarray = field(repr=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PairCountMatrix):
            return NotImplemented
        return (self.label == other.label and self.modulus == other.modulus
                and self.weight == other.weight and np.array_equal(self.entries, other.entries))

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def build_subset_sum_table(residues, modulus: int) -> SubsetSumTable:
    """Count subsets by cardinality and residue of their sum.

    One pass per residue; each pass shifts the whole table by that residue
    and adds it one cardinality up.
    """
    if modulus < 1:
        raise ValueError(f"modulus must be positive, got {modulus}")
    residues = [int(r) % modulus for r in residues]
    m = len(residues)
    dtype = np.int64 if comb(m, m // 2) < _INT64_SAFE else object
    counts = np.zeros((m + 1, modulus), dtype=dtype)
    counts[0, 0] = 1
    for i, r in enumerate(residues):
        # rows 1..i+1 take the old rows 0..i shifted by r; roll copies first
        counts[1:i + 2] += np.roll(counts[:i + 1], r, axis=1)
    return SubsetSumTable(m, modulus, counts.astype(object))


def fold_table(t: SubsetSumTable, d: int) -> SubsetSumTable:
    """Reduce sum residues from mod ``t.modulus`` to mod d."""
    if d < 1 or t.modulus % d:
        raise ValueError(f"{d} does not divide the table modulus {t.modulus}")
    if d == t.modulus:
        return t
    rows = t.counts.shape[0]
    folded = t.counts.reshape(rows, t.modulus // d, d).sum(axis=1)
    return SubsetSumTable(t.source_size, d, folded)


def pair_count_matrix(tS: SubsetSumTable, tR: SubsetSumTable, d: int, w: int,
                      label: str = "") -> PairCountMatrix:
    if tS.modulus != d or tR.modulus != d:
        raise ValueError(
            f"tables must already be folded to modulus {d} "
            f"(got {tS.modulus} and {tR.modulus})")
    neg = (-np.arange(d)) % d
    entries = tS.counts.dot(tR.counts[:, neg].T) * w
    return PairCountMatrix(label or str(d), d, w, entries)


def level_specs(shape: QShape) -> list[tuple[str, int, int]]:
    """``(label, modulus, weight)`` for every level the shape's H formula uses."""
    if not shape.supported:
        raise ValueError(f"unsupported q-shape {shape}")
    q = shape.q
    if shape.kind == "prime":
        return [("q", q, q)]
    q1 = shape.q1
    if shape.kind == "semiprime":
        q2 = shape.q2
        # the label names the common factor of t; the modulus is the cofactor
        return [("q", q, q), ("q1", q2, q2), ("q2", q1, q1)]
    if shape.kind == "prime_square":
        return [("q1^2", q, q), ("q1", q1, q1)]
    return [("q1^3", q, q), ("q1^2", q1 * q1, q1 * q1), ("q1", q1, q1)]


def count_matrices_for_shape(choice: GeneratorChoice, shape: QShape) -> dict[str, PairCountMatrix]:
    """All pair-count matrices for ``choice``, keyed by level label."""
    if choice.q != shape.q:
        raise ValueError(f"choice has q={choice.q} but shape is {shape}")
    specs = level_specs(shape)
    tS = build_subset_sum_table(choice.s_pm, choice.q)
    tR = build_subset_sum_table(choice.r_pm, choice.q)
    out = {}
    for label, d, w in specs:
        out[label] = pair_count_matrix(fold_table(tS, d), fold_table(tR, d), d, w, label)
    return out
