"""Why the unit-class bracket for q = p^3 uses C^{p^3} - C^{p^2}.

The character sum over the units of Z/p^3 is computed directly (complex
arithmetic) and set against both candidate combinations of pair-count
matrices.  At q = 125 the H polynomials built each way are then checked
against the generating functions through H_A - H_B = q D(z) (F_A - F_B).
"""

import numpy as np

from lensiso.chartables import GeneratorChoice, count_matrices_for_shape
from lensiso.numtheory import classify_shape
from lensiso.oracle import class_sum, identity_residual
from lensiso.polynomial import mul
from lensiso.search import enumerate_choices
from lensiso.spectra import SpectralProfile, bracket_poly, build_profile, level_multipliers


def three_term_profile(c, shape, degrees):
    m = count_matrices_for_shape(c, shape)
    e3, e2, e1 = (m[x].entries for x in ("q1^3", "q1^2", "q1"))
    mult = level_multipliers(shape)
    polys = tuple(mul(mult["q1^3-q1^2"], bracket_poly(e3 - e2 - e1, p, c.k))
                  + mul(mult["q1^2-q1"], bracket_poly(e2 - e1, p, c.k))
                  + mul(mult["q1"], bracket_poly(e1, p, c.k)) for p in degrees)
    return SpectralProfile(c, shape, polys)


def main():
    shape = classify_shape(27)
    c = enumerate_choices(27, 3)[0]
    m = count_matrices_for_shape(c, shape)
    direct = class_sum(c, 1)
    two = (m["q1^3"].entries - m["q1^2"].entries).astype(float)
    three = two - m["q1"].entries.astype(float)
    print(f"q=27, S={list(c.s_pm)}")
    print(f"  max |direct - (C27 - C9)|      = {np.abs(direct - two).max():.2e}")
    print(f"  max |direct - (C27 - C9 - C3)| = {np.abs(direct - three).max():.2e}")

    shape = classify_shape(125)
    a = GeneratorChoice.from_s(125, [1, 124, 2, 123])
    b = GeneratorChoice.from_s(125, [1, 124, 6, 119])
    pa, pb = build_profile(a, shape, range(2)), build_profile(b, shape, range(2))
    xa, xb = three_term_profile(a, shape, range(2)), three_term_profile(b, shape, range(2))
    print("q=125, relative residual of the H/F identity (two-term vs three-term)")
    for p in range(2):
        for z in (0.5, 1.3):
            print(f"  p={p} z={z}: {identity_residual(pa, pb, p, z):.1e}  "
                  f"{identity_residual(xa, xb, p, z):.1e}")


if __name__ == "__main__":
    main()
