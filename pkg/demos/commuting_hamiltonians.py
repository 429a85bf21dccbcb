"""Build a three-site chain, diagonalize it, and check the sum rules.

The site Hamiltonians commute pairwise, sum to zero, and satisfy two
moment identities built from the global Casimir. The joint eigenvalue
tuples of the distinguished sector satisfy the same three linear
relations that admissible model parameters do.
"""

import numpy as np

from gcsov import (check_linear_relations, joint_spectrum, make_model,
                   rational_hamiltonians, rational_matrix_reports)


def main():
    m = make_model((0.0, 1.0, 2.5), (-0.5, -1.0, -0.5))
    hams = rational_hamiltonians(m)
    dims = hams[0].shape
    print(f"three sites, spins 1/2, 1, 1/2; joint space dimension {dims[0]}")

    worst = 0.0
    for a in range(m.N):
        for b in range(a + 1, m.N):
            worst = max(worst, np.abs(hams[a] @ hams[b] - hams[b] @ hams[a]).max())
    print(f"worst pairwise commutator entry: {worst:.2e}")

    for rep in rational_matrix_reports(m, tol=1e-10):
        mark = "ok" if rep.passed else "FAIL"
        print(f"  [{mark}] {rep.label:28s} residual {rep.max_residual:.2e}  ({rep.anchor})")

    s = joint_spectrum(m, seed=3)
    print(f"sector '{s.sector}': {len(s.eigen_tuples)} joint tuples")
    for tup, res in zip(s.eigen_tuples, s.residuals):
        pretty = ", ".join(f"{v.real:+.4f}{v.imag:+.4f}j" for v in tup)
        print(f"  mu = ({pretty})   eigen-residual {res:.1e}")

    rep = check_linear_relations(s, m, tol=1e-10)
    print(f"tuple sum rules: residual {rep.max_residual:.2e} "
          f"({'pass' if rep.passed else 'fail'})")


if __name__ == "__main__":
    main()
