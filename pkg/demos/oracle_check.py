"""Floating-point view of the q=67 pair.

Evaluates F_A^p - F_B^p straight from the eigenvalues at a few real z and
prints it beside the exact verdict from the H polynomials.
"""

from lensiso.chartables import GeneratorChoice
from lensiso.oracle import SAMPLE_POINTS, classify_delta, delta_F
from lensiso.spectra import build_profile, compare_profiles

A = [18, 49, 40, 38, 27, 15, 52, 29, 66, 1]
B = [12, 17, 55, 60, 40, 27, 7, 50, 66, 1]


def main():
    a, b = GeneratorChoice.from_s(67, A), GeneratorChoice.from_s(67, B)
    rep = compare_profiles(build_profile(a), build_profile(b))
    print(" p  H equal  F verdict   max |dF|")
    for p in range(6):
        deltas = [delta_F(a, b, p, z) for z in SAMPLE_POINTS]
        print(f"{p:2d}  {str(rep.equal[p]):7s}  {classify_delta(deltas):10s}  "
              f"{max(abs(d) for d in deltas):.2e}")


if __name__ == "__main__":
    main()
