"""Independent floating-point and brute-force checks.

Nothing here uses the subset-sum tables or the H polynomials: characters
and determinants come straight from the rotation angles, and F is Ikeda's
generating function summed over the whole group.  These are the reference
the exact path is tested against.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from itertools import combinations
from math import gcd

import numpy as np

from .chartables import GeneratorChoice, SubsetSumTable
from .numtheory import QShape, cyclotomic, divisors, euler_phi

__all__ = [
    "EigenData",
    "SAMPLE_POINTS",
    "MATCH_TOL",
    "MISMATCH_TOL",
    "PoleError",
    "char_values",
    "det_value",
    "eval_F",
    "delta_F",
    "classify_delta",
    "brute_subset_table",
    "class_sum",
    "root_of_unity_residuals",
    "prop2_residuals",
    "identity_residual",
    "check_root_of_unity",
    "check_prop2",
    "check_consistency",
]

SAMPLE_POINTS = (0.3, 0.5, 0.7, 1.3, 2.0)
MATCH_TOL = 1e-8
MISMATCH_TOL = 1e-4
BRUTE_CAP = 20


class PoleError(ValueError):
    """The evaluation point is too close to a pole of F."""


@dataclass(frozen=True)
class EigenData:
    """Rotation parameters of g (or g-bar): one residue per +/- pair."""

    q: int
    residues: tuple[int, ...]

    def __post_init__(self):
        for r in self.residues:
            if gcd(r, self.q) != 1:
                raise ValueError(f"{r} is not coprime to {self.q}")

    def angles(self, t: int) -> np.ndarray:
        return 2 * np.pi * ((t * np.asarray(self.residues, dtype=np.int64)) % self.q) / self.q

    @classmethod
    def of_r(cls, choice: GeneratorChoice) -> "EigenData":
        return cls(choice.q, choice.r_half)

    @classmethod
    def of_s(cls, choice: GeneratorChoice) -> "EigenData":
        return cls(choice.q, choice.s_half)


def _char_table(e: EigenData, ts) -> np.ndarray:
    """Rows: t; columns: alpha = 0..2n.  Real parts of chi^alpha(g^t)."""
    ts = np.asarray(ts, dtype=np.int64)
    out = np.zeros((len(ts), 2 * len(e.residues) + 1))
    out[:, 0] = 1.0
    deg = 0
    for r in e.residues:
        c2 = 2 * np.cos(2 * np.pi * ((ts * r) % e.q) / e.q)[:, None]
        new = out.copy()
        new[:, 1:deg + 2] += c2 * out[:, :deg + 1]
        new[:, 2:deg + 3] += out[:, :deg + 1]
        out = new
        deg += 2
    return out


def char_values(e: EigenData, t: int) -> np.ndarray:
    """chi^alpha(g^t) for alpha = 0..2n, from the product of (1 + x w)(1 + x/w)."""
    return _char_table(e, [t])[0].astype(complex)


def _det_table(e: EigenData, ts, z) -> np.ndarray:
    ts = np.asarray(ts, dtype=np.int64)
    out = np.ones(len(ts), dtype=complex)
    for r in e.residues:
        c = np.cos(2 * np.pi * ((ts * r) % e.q) / e.q)
        out *= z * z - 2 * c * z + 1
    return out


def det_value(e: EigenData, t: int, z: complex) -> complex:
    return complex(_det_table(e, [t], z)[0])


def _check_pole(q: int, z: complex, tol: float) -> None:
    dist = min(abs(z - cmath.exp(2j * math.pi * j / q)) for j in range(q))
    if dist < tol:
        raise PoleError(f"z = {z} lies within {dist:.3g} of a q-th root of unity")


def eval_F(choice: GeneratorChoice, p: int, z: complex, pole_tol: float = 1e-3) -> complex:
    """Ikeda's generating function F^p_G(z) for G = <g>, g built on +/-R.

    Characters of degree outside 0..2n are zero.
    """
    _check_pole(choice.q, z, pole_tol)
    q = choice.q
    e = EigenData.of_r(choice)
    ts = np.arange(1, q + 1)
    chars = _char_table(e, ts)
    dets = _det_table(e, ts, z)
    total = 0j
    for b in range(p + 1):
        a = p - b
        if a > chars.shape[1] - 1:
            continue
        inner = np.sum(chars[:, a] / dets)
        total += (-1) ** b * (z ** (-b) - z ** (b + 2)) * inner
    return total / q + (-1) ** (p + 1) * z ** (-p)


def delta_F(a: GeneratorChoice, b: GeneratorChoice, p: int, z: complex,
            pole_tol: float = 1e-3) -> complex:
    """F^p_A(z) - F^p_B(z), summed term by term.

    The t = q term and the trailing monomial are identical for both groups
    and are left out, so they cannot leak rounding error into the result.
    """
    if (a.q, a.n) != (b.q, b.n):
        raise ValueError("choices must share q and n")
    _check_pole(a.q, z, pole_tol)
    q = a.q
    ts = np.arange(1, q)
    ea, eb = EigenData.of_r(a), EigenData.of_r(b)
    ca, cb = _char_table(ea, ts), _char_table(eb, ts)
    da, db = _det_table(ea, ts, z), _det_table(eb, ts, z)
    total = 0j
    for j in range(p + 1):
        deg = p - j
        if deg > ca.shape[1] - 1:
            continue
        inner = np.sum(ca[:, deg] / da - cb[:, deg] / db)
        total += (-1) ** j * (z ** (-j) - z ** (j + 2)) * inner
    return total / q


def classify_delta(deltas) -> str:
    """``"equal"`` if every |dF| < MATCH_TOL, ``"different"`` if some
    |dF| > MISMATCH_TOL, otherwise ``"inconclusive"``."""
    mags = [abs(d) for d in deltas]
    if all(m < MATCH_TOL for m in mags):
        return "equal"
    if any(m > MISMATCH_TOL for m in mags):
        return "different"
    return "inconclusive"


def brute_subset_table(residues, modulus: int) -> SubsetSumTable:
    """Subset-sum table by listing every subset."""
    residues = list(residues)
    if len(residues) > BRUTE_CAP:
        raise ValueError(f"brute force is capped at {BRUTE_CAP} residues, got {len(residues)}")
    m = len(residues)
    counts = np.zeros((m + 1, modulus), dtype=object)
    for a in range(m + 1):
        for sub in combinations(residues, a):
            counts[a, sum(sub) % modulus] += 1
    return SubsetSumTable(m, modulus, counts)


def class_sum(choice: GeneratorChoice, d: int) -> np.ndarray:
    """sum over t in 1..q with gcd(t, q) = d of chi^beta(g^t) chi^alpha(gbar^t).

    Returned as a float array indexed [alpha, beta].
    """
    q = choice.q
    ts = [t for t in range(1, q + 1) if gcd(t, q) == d]
    cs = _char_table(EigenData.of_s(choice), ts)
    cr = _char_table(EigenData.of_r(choice), ts)
    return cs.T @ cr


def root_of_unity_residuals(shape: QShape, span: int = 2) -> list[tuple[int, int, float]]:
    """Check the geometric-sum lemma at every level e dividing q.

    For each divisor e of q and each l in 0..span*q, compares
    sum_{t=1..e} exp(2 pi i t l / e) with e if e | l else 0.  Also checks the
    restricted sums over t with gcd(t, q) = d against the inclusion-exclusion
    values the count matrices rely on.  Returns ``(e, l, residual)`` rows.
    """
    q = shape.q
    rows = []
    levels = divisors(q)
    for ell in range(span * q + 1):
        full = {}
        for e in levels:
            s = sum(cmath.exp(2j * math.pi * t * ell / e) for t in range(1, e + 1))
            pred = e if ell % e == 0 else 0
            full[e] = pred
            rows.append((e, ell, abs(s - pred)))
        # the unit class: sum over gcd(t, q) = 1, by inclusion-exclusion over
        # the prime divisors of q (Moebius over squarefree divisors)
        s_units = sum(cmath.exp(2j * math.pi * t * ell / q)
                      for t in range(1, q + 1) if gcd(t, q) == 1)
        pred_units = _unit_class_prediction(shape, full)
        rows.append((-1, ell, abs(s_units - pred_units)))
    return rows


def _unit_class_prediction(shape: QShape, full: dict[int, int]) -> int:
    q = shape.q
    if shape.kind == "prime":
        return full[q] - 1
    if shape.kind == "semiprime":
        return full[q] - full[shape.q2] - full[shape.q1] + 1
    q1 = shape.q1
    return full[q] - full[q // q1]


def prop2_residuals(choice: GeneratorChoice, zs=SAMPLE_POINTS) -> list[tuple[int, float, float]]:
    """Relative error of det(z - g^t) det(z - gbar^t) against the cyclotomic
    power Psi_{q/d}(z)^(phi(q)/phi(q/d)), d = gcd(t, q), for t = 1..q-1."""
    q = choice.q
    er, es = EigenData.of_r(choice), EigenData.of_s(choice)
    out = []
    for t in range(1, q):
        d = gcd(t, q)
        e = q // d
        expo = euler_phi(q) // euler_phi(e)
        psi = cyclotomic(e)
        for z in zs:
            got = det_value(er, t, z) * det_value(es, t, z)
            want = psi(z) ** expo
            out.append((t, z, abs(got - want) / abs(want)))
    return out


def identity_residual(pa, pb, p: int, z: float) -> float:
    """Relative mismatch between H_A - H_B and q * D(z) * (F_A - F_B) at z.

    Only meaningful when H_A != H_B; for equal H the verdict check covers it.
    """
    from .spectra import common_denominator
    a, b = pa.choice, pb.choice
    dh = (pa.polys[p] - pb.polys[p])(z)
    rhs = a.q * common_denominator(pa.shape)(z) * delta_F(a, b, p, z)
    scale = max(abs(dh), abs(rhs))
    return abs(dh - rhs) / scale if scale else 0.0


# ---- property suites used by `lensiso selftest` and the test-suite ----

def check_root_of_unity(qs, tol: float = 1e-9):
    from .numtheory import classify_shape
    for q in qs:
        shape = classify_shape(q)
        for e, ell, res in root_of_unity_residuals(shape):
            if res >= tol:
                return {"suite": "root-of-unity", "q": q, "level": e, "l": ell, "residual": res}
    return None


def check_prop2(qs, tol: float = 1e-9):
    """Prop. 2 products for every t, using one split per k (the first k
    half-representatives as S); the product does not depend on the split."""
    from .numtheory import unit_residues
    for q in qs:
        halves = unit_residues(q).half()
        for k in range(1, len(halves)):
            s = [t for t in halves[:k]] + [q - t for t in halves[:k]]
            choice = GeneratorChoice.from_s(q, s)
            for t, z, rel in prop2_residuals(choice):
                if rel >= tol:
                    return {"suite": "prop2", "q": q, "s": list(choice.s_pm), "t": t,
                            "z": z, "residual": rel}
    return None


def check_consistency(qs, fault: bool = False, identity_tol: float = 1e-6):
    """Exact H verdicts against F at the sample points, for every class pair.

    With ``fault`` set, one pair-count entry of the first class for each
    (q, k) is bumped before its profile is built; the suite must then fail.
    """
    from .chartables import PairCountMatrix, count_matrices_for_shape
    from .numtheory import classify_shape, unit_residues
    from .search import enumerate_choices
    from .spectra import build_profile, profile_from_matrices
    for q in qs:
        shape = classify_shape(q)
        half = len(unit_residues(q)) // 2
        for k in range(1, half):
            classes = enumerate_choices(q, k, shape)
            profiles = [build_profile(c, shape) for c in classes]
            if fault:
                mats = count_matrices_for_shape(classes[0], shape)
                label = next(iter(mats))
                m = mats[label]
                bumped = m.entries.copy()
                bumped[1, 1] += m.weight
                mats[label] = PairCountMatrix(m.label, m.modulus, m.weight, bumped)
                profiles[0] = profile_from_matrices(classes[0], shape, mats)
            # each class also meets a unit multiple of itself: same lens
            # space, different residue lists, so H and F must both agree
            u = next(t for t in range(2, q) if gcd(t, q) == 1)
            twins = [build_profile(c.scaled(u), shape) for c in classes]
            pairs = [(profiles[i], twins[i]) for i in range(len(classes))]
            pairs += [(profiles[i], profiles[j])
                      for i, j in combinations(range(len(classes)), 2)]
            for pa, pb in pairs:
                for p in range(pa.n + 1):
                    exact = pa.polys[p] == pb.polys[p]
                    deltas = [delta_F(pa.choice, pb.choice, p, z) for z in SAMPLE_POINTS]
                    verdict = classify_delta(deltas)
                    bad = None
                    if verdict == "inconclusive":
                        bad = "inconclusive"
                    elif (verdict == "equal") != exact:
                        bad = "verdict"
                    elif not exact:
                        worst = max(identity_residual(pa, pb, p, z) for z in SAMPLE_POINTS)
                        if worst > identity_tol:
                            bad = "identity"
                    if bad:
                        return {"suite": "consistency", "kind": bad, "q": q, "k": k, "p": p,
                                "a": list(pa.choice.s_pm), "b": list(pb.choice.s_pm),
                                "h_equal": exact, "f_verdict": verdict,
                                "max_abs_dF": max(abs(d) for d in deltas)}
    return None
