"""Tour of the multiplicative special functions.

Evaluates the theta factor, its logarithmic derivative and the lattice
average on the annulus for a few nomes, then sweeps the defining
identities and prints worst-case residuals.
"""

import cmath
import math

import numpy as np

from gcsov import EllipticParams, KERNEL_PRODUCT_SIGN, normalized_lame_kernel, theta, \
    theta_log_deriv, weierstrass_p
from gcsov.special_functions import _mult_dist_to_lattice


def annulus_points(rng, p, count):
    out = []
    while len(out) < count:
        z = cmath.exp(complex(rng.uniform(math.log(abs(p.q)), 0.0),
                              rng.uniform(0.0, 2.0 * math.pi)))
        if _mult_dist_to_lattice(z, p) > 0.08:
            out.append(z)
    return out


def main():
    rng = np.random.default_rng(11)
    print("value table at q = 0.05")
    p = EllipticParams(q=0.05)
    for z in (0.3 + 0.1j, -0.6, 0.9j):
        print(f"  z = {z!s:12}  theta = {theta(z, p):.6f}  "
              f"tdot/t = {theta_log_deriv(z, p):.6f}  wp = {weierstrass_p(z, p):.6f}")

    for q in (0.1, 0.05, 0.1 + 0.05j):
        p = EllipticParams(q=q)
        quasi = inv = kern = 0.0
        for z in annulus_points(rng, p, 60):
            quasi = max(quasi, abs(theta(q * z, p) + theta(z, p) / z))
            inv = max(inv, abs(theta(1.0 / z, p) + theta(z, p) / z))
        done = 0
        while done < 60:
            x, w = annulus_points(rng, p, 2)
            if _mult_dist_to_lattice(x * w, p) < 0.05 or _mult_dist_to_lattice(x / w, p) < 0.05:
                continue
            lhs = normalized_lame_kernel(x, w, p) * normalized_lame_kernel(1.0 / x, w, p)
            rhs = KERNEL_PRODUCT_SIGN * (weierstrass_p(x, p) - weierstrass_p(w, p))
            kern = max(kern, abs(lhs - rhs))
            done += 1
        print(f"q = {q}:  quasi-periodicity {quasi:.2e}   inversion {inv:.2e}   "
              f"kernel product {kern:.2e}")

    p0 = EllipticParams(q=1e-14)
    drift = max(abs(theta(z, p0) - (1.0 - z))
                for z in annulus_points(rng, EllipticParams(q=0.3), 60))
    print(f"q -> 0 collapse onto 1 - z: {drift:.2e}")

    p = EllipticParams(q=0.05)
    pole = max(abs(weierstrass_p(cmath.exp(t), p) * t * t - 1.0)
               for t in (1e-4, 1e-4j, 3e-5 * cmath.exp(0.7j)))
    print(f"double pole of wp at the lattice: |wp(e^tau) tau^2 - 1| = {pole:.2e}")


if __name__ == "__main__":
    main()
