import random

import numpy as np
import pytest

from lensiso.chartables import GeneratorChoice, count_matrices_for_shape
from lensiso.numtheory import classify_shape, cyclotomic
from lensiso.oracle import class_sum, identity_residual
from lensiso.polynomial import LaurentPoly, mul, pow, substitute_power
from lensiso.search import enumerate_choices
from lensiso.spectra import (
    MatchReport,
    SpectralProfile,
    bracket_poly,
    build_profile,
    common_denominator,
    compare_profiles,
    level_multipliers,
    runs_of,
)

from conftest import all_choices, random_choice

Q67 = ([18, 49, 40, 38, 27, 15, 52, 29, 66, 1], [12, 17, 55, 60, 40, 27, 7, 50, 66, 1])
Q65 = ([31, 34, 64, 9, 1, 56], [36, 41, 29, 24, 64, 1])


def q5_matrix():
    return count_matrices_for_shape(GeneratorChoice.from_s(5, [1, 4]), classify_shape(5))["q"]


def test_bracket_q5():
    m = q5_matrix()
    assert bracket_poly(m, 0, 1) == LaurentPoly.from_dict({0: 5, 4: -5})
    assert bracket_poly(m, 1, 1) == LaurentPoly.from_dict({-1: -5, 1: -5, 3: 5, 5: 5})
    assert bracket_poly(np.zeros((3, 3), dtype=object), 1, 1).is_zero
    with pytest.raises(ValueError):
        bracket_poly(m, 3, 1)
    with pytest.raises(ValueError):
        bracket_poly(m, 0, 2)


def test_profile_q5():
    prof = build_profile(GeneratorChoice.from_s(5, [1, 4]))
    assert list(prof.polys) == [LaurentPoly.from_dict({0: 5, 4: -5}),
                                LaurentPoly.from_dict({-1: -5, 1: -5, 3: 5, 5: 5})]
    assert len(prof) == 2 and prof.n == 1


def test_profile_is_deterministic():
    c = GeneratorChoice.from_s(65, Q65[0])
    a, b = build_profile(c), build_profile(c)
    assert a.polys == b.polys and a.digests() == b.digests()


def appendix_eta(M, p, k):
    """Prime-case H as the original search program assembles it: for each
    a and t, (-1)^(t+a) C[a][p-t] placed at powers a-t and a+t+2."""
    terms = {}
    for a in range(2 * k + 1):
        for t in range(p + 1):
            c = (-1) ** (t + a) * M[a][p - t]
            terms[a - t] = terms.get(a - t, 0) + c
            terms[a + t + 2] = terms.get(a + t + 2, 0) - c
    return LaurentPoly.from_dict(terms)


def test_bracket_equals_appendix_construction():
    for q in (5, 7, 11, 13):
        for c in all_choices(q):
            M = count_matrices_for_shape(c, classify_shape(q))["q"].entries
            for p in range(c.n + 1):
                assert bracket_poly(M, p, c.k) == appendix_eta(M, p, c.k)


def regrouped(choice, shape, p):
    """The alternate grouping of H: one bracket per raw pair-count matrix."""
    mats = {k: m.entries for k, m in count_matrices_for_shape(choice, shape).items()}
    br = {key: bracket_poly(m, p, choice.k) for key, m in mats.items()}
    q = shape.q
    if shape.kind == "semiprime":
        q1, q2 = shape.q1, shape.q2
        top = mul(pow(cyclotomic(q1), q2 - 1), pow(cyclotomic(q2), q1 - 1))
        m1 = mul(cyclotomic(q), pow(cyclotomic(q1), q2 - 1))
        m2 = mul(cyclotomic(q), pow(cyclotomic(q2), q1 - 1))
        return mul(top, br["q"]) + mul(m1 - top, br["q1"]) + mul(m2 - top, br["q2"])
    q1 = shape.q1
    psi = cyclotomic(q1)
    if shape.kind == "prime_square":
        return mul(pow(psi, q1), br["q1^2"]) + mul(substitute_power(psi, q1) - pow(psi, q1), br["q1"])
    A = mul(pow(substitute_power(psi, q1), q1), pow(psi, q1 * q1))
    B = mul(substitute_power(psi, q1 * q1), pow(psi, q1 * q1))
    C = mul(substitute_power(psi, q1 * q1), pow(substitute_power(psi, q1), q1))
    # grouping of the corrected cube form: A(C3 - C2) + B(C2 - C1) + C C1
    return mul(A, br["q1^3"]) + mul(B - A, br["q1^2"]) + mul(C - B, br["q1"])


@pytest.mark.parametrize("q", [9, 15, 21, 25, 27, 35, 49])
def test_regrouped_forms_agree(q):
    rng = random.Random(q)
    shape = classify_shape(q)
    for _ in range(6):
        c = random_choice(q, rng)
        prof = build_profile(c, shape)
        for p in range(c.n + 1):
            assert prof.polys[p] == regrouped(c, shape, p)


def test_unit_invariance():
    rng = random.Random(7)
    for q in (11, 13, 15, 25, 27, 29, 35):
        pool = all_choices(q)
        for _ in range(3):
            c = rng.choice(pool)
            u = rng.choice([t for t in range(2, q) if np.gcd(t, q) == 1])
            assert build_profile(c).polys == build_profile(c.scaled(u)).polys


def test_exponent_window():
    for q in (13, 15, 25, 27):
        shape = classify_shape(q)
        extra = max(m.max_exp for m in level_multipliers(shape).values())
        for c in all_choices(q)[::5]:
            for p, h in enumerate(build_profile(c, shape).polys):
                if not h.is_zero:
                    assert h.min_exp >= -p
                    assert h.max_exp <= 2 * c.k + p + 2 + extra


def test_cube_unit_class_is_c3_minus_c2():
    # the character sum over units of Z/27 equals C^{27} - C^{9}; the printed
    # three-term combination would also subtract C^{3}
    shape = classify_shape(27)
    for c in enumerate_choices(27, 3)[:6]:
        m = count_matrices_for_shape(c, shape)
        want = (m["q1^3"].entries - m["q1^2"].entries).astype(float)
        assert np.abs(class_sum(c, 1) - want).max() < 1e-8
        printed = want - m["q1"].entries.astype(float)
        assert np.abs(class_sum(c, 1) - printed).max() > 1


def _printed_cube_profile(c, shape):
    mats = count_matrices_for_shape(c, shape)
    e3, e2, e1 = (mats[x].entries for x in ("q1^3", "q1^2", "q1"))
    mult = level_multipliers(shape)
    polys = []
    for p in range(2):
        polys.append(mul(mult["q1^3-q1^2"], bracket_poly(e3 - e2 - e1, p, c.k))
                     + mul(mult["q1^2-q1"], bracket_poly(e2 - e1, p, c.k))
                     + mul(mult["q1"], bracket_poly(e1, p, c.k)))
    return SpectralProfile(c, shape, tuple(polys))


def test_cube_formula_against_generating_function_q125():
    # at q = 125 the +/-S residues mod 5 differ between these choices, so the
    # printed and corrected combinations disagree; only the corrected one
    # satisfies H_A - H_B = q D(z) (F_A - F_B)
    shape = classify_shape(125)
    a = GeneratorChoice.from_s(125, [1, 124, 2, 123])
    b = GeneratorChoice.from_s(125, [1, 124, 6, 119])
    pa, pb = build_profile(a, shape, range(2)), build_profile(b, shape, range(2))
    xa, xb = _printed_cube_profile(a, shape), _printed_cube_profile(b, shape)
    for p in range(2):
        for z in (0.3, 0.5, 0.7, 1.3, 2.0):
            assert identity_residual(pa, pb, p, z) < 1e-9
            assert identity_residual(xa, xb, p, z) > 0.1


def test_common_denominator():
    assert common_denominator(classify_shape(7)) == cyclotomic(7)
    s = classify_shape(15)
    assert common_denominator(s) == mul(cyclotomic(15), mul(pow(cyclotomic(3), 4), pow(cyclotomic(5), 2)))


def test_q67_table_pair():
    a, b = (GeneratorChoice.from_s(67, s) for s in Q67)
    r = compare_profiles(build_profile(a), build_profile(b))
    assert r.equal_degrees == [1, 2]
    assert not r.equal[0]
    assert r.p_form_isospectral(2) and not r.p_form_isospectral(1)
    assert r.form_degrees == [2]


def test_q65_table_pair():
    a, b = (GeneratorChoice.from_s(65, s) for s in Q65)
    r = compare_profiles(build_profile(a), build_profile(b))
    assert len(r.equal) == 22
    assert r.equal_degrees == [0, 1, 2, 11, 12]
    assert r.runs == [(0, 2), (11, 12)]
    assert r.form_degrees == [0, 1, 2, 12]


def test_runs_and_reports():
    assert runs_of([]) == []
    assert runs_of([True, True, False, True]) == [(0, 1), (3, 3)]
    assert runs_of([False, True, True]) == [(1, 2)]
    r = MatchReport.make(7, 1, (2, 5), (1, 6), [True, False])
    assert r.choice_a == (1, 6) and r == MatchReport.make(7, 1, (1, 6), (2, 5), [True, False])
    with pytest.raises(ValueError):
        r.p_form_isospectral(0)


def test_self_comparison_all_equal():
    c = GeneratorChoice.from_s(65, Q65[0])
    r = compare_profiles(build_profile(c), build_profile(c))
    assert all(r.equal) and r.runs == [(0, c.n)]


def test_compare_rejects_mismatch():
    a = build_profile(GeneratorChoice.from_s(13, [1, 12]))
    b = build_profile(GeneratorChoice.from_s(13, [1, 12, 2, 11]))
    with pytest.raises(ValueError):
        compare_profiles(a, b)
    with pytest.raises(ValueError):
        build_profile(GeneratorChoice.from_s(13, [1, 12]), degrees=[9])
