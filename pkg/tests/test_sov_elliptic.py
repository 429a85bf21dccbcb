import cmath
import math

import numpy as np
import pytest

from gcsov.gaudin import make_model
from gcsov.operators import eval_terms, fd_jacobian
from gcsov.special_functions import (
    EllipticParams,
    _mult_dist_to_lattice,
    theta,
    theta_log_deriv,
    weierstrass_p,
)
from gcsov.sov import (
    ChartBoundaryError,
    EllipticSovFrame,
    SeparatedCoordinates,
    SovError,
    elliptic_u_to_w,
    elliptic_w_to_u,
    radon_current_operators,
    radon_hamiltonians_elliptic,
    separated_operator,
    sov_jacobian_elliptic,
    verify_elliptic_separation,
)

Q = 0.05


def torus_model(n=3, q=Q, lam=None):
    z = [cmath.exp(2j * math.pi * a / n + 0.1j * a) * (1 + 0.1 * a) for a in range(n)]
    lam = lam if lam is not None else [-0.5, 1.0, 0.75, -1.5][:n]
    return make_model(z, lam, q=q)


def generic_u(n, seed):
    rng = np.random.default_rng(seed)
    return rng.normal(size=n) + 1j * rng.normal(size=n)


T2 = cmath.exp(0.13 + 2.31j)


# -------------------------------------------------------------------- the chart


@pytest.mark.parametrize("q", [0.05, 0.1 + 0.05j])
def test_zero_count_and_exact_product_constraint(q):
    m = torus_model(3, q)
    u = generic_u(3, 1)
    s = elliptic_u_to_w(u, T2, m, strict=False)
    assert len(s.w) == m.N
    # representatives are adjusted so the constraint holds exactly, not mod q
    lhs = s.t2 * np.prod(np.array(s.w))
    rhs = np.prod(np.array(m.z))
    assert abs(lhs - rhs) < 1e-10 * abs(rhs)


@pytest.mark.parametrize("n,seed", [(2, 3), (3, 4), (4, 5)])
def test_roundtrip_u_w_u(n, seed):
    m = torus_model(n)
    u = generic_u(n, seed)
    s = elliptic_u_to_w(u, T2, m, strict=False)
    back = np.array(elliptic_w_to_u(s, m).u)
    assert np.abs(back - u).max() < 1e-9 * np.abs(u).max()
    # no zero-sum constraint here; the sum rides along unchanged
    assert abs(back.sum() - u.sum()) < 1e-9 * np.abs(u).max()


def test_roundtrip_w_u_w_mod_lattice():
    m = torus_model(3)
    p = EllipticParams(q=Q)
    u = generic_u(3, 6)
    s = elliptic_u_to_w(u, T2, m, strict=False)
    s2 = elliptic_u_to_w(elliptic_w_to_u(s, m).u, T2, m, strict=False)
    assert max(_mult_dist_to_lattice(a / b, p) for a, b in zip(s2.w, s.w)) < 1e-9
    assert abs(s2.C - s.C) < 1e-9 * abs(s.C)


def test_representative_shift_rescales_section():
    # moving w_1 -> q w_1, w_N -> w_N/q keeps the product constraint but
    # multiplies every residue by the same constant w_N/(q w_1)
    m = torus_model(3)
    u = generic_u(3, 7)
    s = elliptic_u_to_w(u, T2, m, strict=False)
    ws = list(s.w)
    ws[0] *= Q
    ws[-1] /= Q
    shifted = SeparatedCoordinates("elliptic", s.C, tuple(ws), 0, s.t2)
    u2 = np.array(elliptic_w_to_u(shifted, m).u)
    ratio = u2 / np.array(elliptic_w_to_u(s, m).u)
    assert np.abs(ratio - ratio[0]).max() < 1e-10 * abs(ratio[0])
    assert abs(ratio[0] - s.w[-1] / (Q * s.w[0])) < 1e-9 * abs(ratio[0])


def test_w_to_u_rejects_non_lattice_product():
    m = torus_model(2)
    bad = SeparatedCoordinates("elliptic", 1.0, (0.9 + 0.1j, 0.4 - 0.6j), 0, T2)
    with pytest.raises(SovError, match="abel_violation"):
        elliptic_w_to_u(bad, m)


def test_strict_chart_flags_root_at_site():
    m = torus_model(2)
    w1 = m.z[0] * (1 + 2e-8)
    w2 = np.prod(np.array(m.z)) / (T2 * w1)
    s = SeparatedCoordinates("elliptic", 0.7 + 0.2j, (w1, complex(w2)), 0, T2)
    u = elliptic_w_to_u(s, m)
    with pytest.raises(ChartBoundaryError):
        elliptic_u_to_w(u.u, T2, m, strict=True)
    s2 = elliptic_u_to_w(u.u, T2, m, strict=False)
    assert "root_at_site" in s2.flags


def test_small_nome_matches_rational_limit():
    # at q = 1e-5 the transform must agree with the q = 0 closed forms
    # theta(z) -> 1 - z to a few parts in 1e3
    q = 1e-5
    m = torus_model(3, q)
    u = generic_u(3, 8)
    s = elliptic_u_to_w(u, T2, m, strict=False)
    z = np.array(m.z)
    # rational-limit residue formula on the same representatives
    for a in range(m.N):
        num = s.C * np.prod([1 - z[a] / wj for wj in s.w])
        den = np.prod([1 - z[a] / z[b] for b in range(m.N) if b != a])
        assert abs(num / den - u[a]) < 1e-3 * abs(u[a])
    # and the zeros sit near the roots of the degenerate numerator polynomial
    poly = np.zeros(m.N + 1, dtype=complex)
    for a in range(m.N):
        poly += u[a] * np.poly(np.append(np.delete(z, a), z[a] / T2))
    target = sorted(np.roots(poly), key=lambda v: (np.angle(v), abs(v)))
    got = sorted(s.w, key=lambda v: (np.angle(v), abs(v)))
    assert np.abs(np.array(got) - np.array(target)).max() < 1e-3


# -------------------------------------------------------------------- jacobian


def test_elliptic_jacobian_matches_finite_differences():
    m = torus_model(3)
    u = generic_u(3, 9)
    cmap = sov_jacobian_elliptic(u, T2, m)
    pt = tuple(u) + (T2,)
    J = np.asarray(cmap.jacobian(pt))
    Jfd = fd_jacobian(lambda p_: cmap.forward(p_), pt, h=1e-7)
    assert J.shape == (m.N + 2, m.N + 1)
    assert np.abs(J - Jfd).max() < 1e-5 * max(1.0, np.abs(J).max())


def test_elliptic_jacobian_inverse_consistency():
    m = torus_model(2)
    u = generic_u(2, 10)
    cmap = sov_jacobian_elliptic(u, T2, m)
    pt = tuple(u) + (T2,)
    cw = cmap.forward(pt)
    back = np.array(cmap.inverse(cw))
    assert np.abs(back - np.array(pt)).max() < 1e-9


# ----------------------------------------------------------- transformed fit


def test_radon_density_fits_the_four_term_expansion():
    m = torus_model(2, lam=[-0.5, -0.5])
    fit = radon_hamiltonians_elliptic(m)
    assert fit.condition < 50
    pt = (T2, 0.7 + 0.2j, -0.4 + 0.9j)
    assert fit.fit_residual(pt) < 1e-9


def test_radon_current_multiplier_vanishes_at_zero():
    # f-current evaluated at a zero of the section is the defining equation
    m = torus_model(3)
    u = generic_u(3, 11)
    frame = EllipticSovFrame(m, u, T2)
    pt = frame.base_point()
    for wi in frame.base_w:
        _, fbar, _ = radon_current_operators(m, wi)
        snap = eval_terms(fbar, pt)
        assert abs(snap[(0,) * (m.N + 1)]) < 1e-10


# ------------------------------------------------------------ certified chain


def test_verify_elliptic_separation_passes_and_control_fires():
    m = torus_model(2, lam=[-0.5, -0.5])
    reports = verify_elliptic_separation(m, points=2, tol=1e-7, seed=13)
    by_label = {r.label: r for r in reports}
    for tag in ("a-term-decomposition", "b-euler-pole", "c-scalar-pole",
                "d-separated-form"):
        r = by_label[f"elliptic-{tag}"]
        assert r.passed and not r.expect_failure, (r.label, r.max_residual)
    ctrl = by_label["elliptic-control-casimir-variant"]
    assert ctrl.expect_failure and ctrl.passed and ctrl.max_residual > ctrl.tol


def test_verify_elliptic_separation_unit_weights():
    # lam = -1 everywhere: the scalar pole pieces cancel term by term and the
    # twisting exponent vanishes, so the chain runs untwisted
    m = torus_model(2, lam=[-1.0, -1.0])
    reports = verify_elliptic_separation(m, points=1, tol=1e-7, seed=14,
                                         include_controls=False)
    assert all(r.passed for r in reports), [(r.label, r.max_residual)
                                            for r in reports]


def test_scalar_pole_terms_vanish_identically_at_unit_weights():
    m = torus_model(2, lam=[-1.0, -1.0])
    u = generic_u(2, 15)
    frame = EllipticSovFrame(m, u, T2)
    sc = frame.scalars(0)
    lamp1 = np.array(m.lam) + 1
    t10 = -2 * (lamp1 * sc["k"] * sc["kinv"]).sum()
    t12 = 2 * (lamp1 * sc["p_hat"]).sum()
    assert abs(t10) == 0 and abs(t12) == 0


# --------------------------------------------------------- separated operator


def test_separated_operator_elliptic_coefficients():
    m = make_model([1.0, cmath.exp(2.1j)], [-0.5, -0.5], mu=[1.0, -1.0],
                   q=Q, mu0=0.3)
    D = separated_operator(m)
    p = EllipticParams(q=Q)
    w = 0.8 * cmath.exp(0.7j)
    snap = eval_terms(D, (w,))
    assert abs(snap[(2,)] - 2 * w**2) < 1e-12
    assert abs(snap[(1,)] - 2 * w) < 1e-12
    want = -0.3 - sum(mu * theta_log_deriv(w / za, p)
                      + 2 * la * (la + 1) * weierstrass_p(w / za, p)
                      for za, la, mu in zip(m.z, m.lam, m.mu))
    assert abs(snap[(0,)] - want) < 1e-12


def test_separated_operator_needs_mu():
    with pytest.raises(SovError):
        separated_operator(torus_model(2))
