import math

import numpy as np
import pytest

from vortexcap.geometry import DomainError
from vortexcap.spectral import (
    admissible_region_scan,
    band_det_coeffs,
    band_discriminant,
    band_matrix,
    band_speeds,
    burbea_shifted_speed,
    collision_scan,
    coupling_factor,
    find_threshold_n,
    nondegeneracy_case,
    one_interface_symbol,
)
from vortexcap.states import BandState, solve_gauss_one, solve_gauss_two


def degenerate_band(theta1, theta2, omega_n, gamma=0.0):
    """Band on the condition-2 family omega_s = -omega_n(1-cos t2)/(1+cos t1)."""
    omega_s = -omega_n * (1 - math.cos(theta2)) / (1 + math.cos(theta1))
    return solve_gauss_two(theta1, theta2, omega_n, omega_s, gamma)


def random_band(rng):
    t1 = rng.uniform(0.3, 1.9)
    t2 = rng.uniform(t1 + 0.3, min(t1 + 1.7, math.pi - 0.2))
    wn = rng.uniform(-2, 2)
    ws = rng.uniform(-2, 2)
    gam = rng.uniform(-1, 1)
    return solve_gauss_two(t1, t2, wn, ws, gam)


def test_burbea_examples():
    assert burbea_shifted_speed(1, 0.7, 1.0, -1.0) == 0.7
    assert burbea_shifted_speed(2, 0.0, 0.5, -0.5) == pytest.approx(-0.25)
    vals = [burbea_shifted_speed(m, 0.0, 0.5, -0.5) for m in range(1, 2000)]
    assert all(b < a for a, b in zip(vals, vals[1:]))  # strictly decreasing
    assert vals[-1] == pytest.approx(-0.5, abs=3e-4)


def test_one_interface_symbol(hemisphere):
    st = solve_gauss_one(1.2, -0.8, 0.3)
    for m, n in [(1, 1), (2, 3), (5, 2)]:
        c = burbea_shifted_speed(m * n, st.gamma, st.omega_n, st.omega_s)
        assert one_interface_symbol(m, n, c, st) == pytest.approx(0.0, abs=1e-14)
    st2 = solve_gauss_one(math.pi / 3, -0.25)  # jump = 1
    assert one_interface_symbol(3, 1, 0.0, st2) == pytest.approx(-1.0, abs=1e-13)
    assert one_interface_symbol(1, 1, 0.37, st2) == pytest.approx(
        st2.gamma - 0.37, abs=1e-14
    )


def test_symbol_vanishes_only_at_burbea(hemisphere):
    roots = {n: burbea_shifted_speed(n, 0.0, 1.0, -1.0) for n in range(1, 101)}
    for n in range(1, 101):
        for other, c in roots.items():
            val = one_interface_symbol(1, n, c, hemisphere)
            if other == n:
                assert abs(val) < 1e-13
            else:
                assert abs(val) > 1e-4  # strict monotonicity separates the roots


def test_band_matrix_symmetric_example(symmetric_band):
    mat = band_matrix(2, 0.0, symmetric_band)
    assert mat.m11 == pytest.approx(-1.0 / 6.0, abs=1e-15)
    assert mat.m22 == pytest.approx(1.0 / 6.0, abs=1e-15)
    assert mat.m12 == pytest.approx(-1.0 / 18.0, abs=1e-15)
    assert mat.m21 == pytest.approx(1.0 / 18.0, abs=1e-15)


def test_band_matrix_offdiagonal_product(rng):
    for _ in range(30):
        band = random_band(rng)
        n = int(rng.integers(1, 40))
        mat = band_matrix(n, rng.normal(), band)
        expected = (
            (band.omega_n - band.omega_c)
            * (band.omega_c - band.omega_s)
            / (4.0 * n * n)
            * coupling_factor(n, band.theta1, band.theta2) ** 2
        )
        assert mat.m12 * mat.m21 == pytest.approx(expected, abs=1e-12)


def test_band_matrix_large_n_limits(symmetric_band):
    b = symmetric_band
    mat = band_matrix(4000, 0.3, b)
    d1 = 0.3 * 0 - 0.3 + b.gamma - b.omega_n / (2 * math.cos(b.theta1 / 2) ** 2)
    d2 = -0.3 + b.gamma + b.omega_s / (2 * math.sin(b.theta2 / 2) ** 2)
    assert mat.m11 == pytest.approx(d1, abs=1e-3)
    assert mat.m22 == pytest.approx(d2, abs=1e-3)
    assert mat.m12 == 0.0 and mat.m21 == 0.0  # coupling underflows cleanly


def test_det_coeffs_and_discriminant(symmetric_band, rng):
    beta2, gamma2 = band_det_coeffs(2, symmetric_band)
    assert beta2 == pytest.approx(0.0, abs=1e-15)
    # det polynomial reproduces det(M_n(c)) and its c = 0 value is gamma_n
    for _ in range(20):
        band = random_band(rng)
        n = int(rng.integers(1, 30))
        beta, gam = band_det_coeffs(n, band)
        assert band_matrix(n, 0.0, band).det() == pytest.approx(gam, abs=1e-12)
        for c in rng.normal(size=5):
            poly = c * c - beta * c + gam
            assert band_matrix(n, c, band).det() == pytest.approx(poly, abs=1e-10)
        # affine gamma dependence of beta
        shifted = BandState(
            band.theta1, band.theta2, band.omega_n, band.omega_c, band.omega_s,
            band.gamma + 0.7,
        )
        assert band_det_coeffs(n, shifted)[0] == pytest.approx(
            beta + 1.4, abs=1e-12
        )
        # discriminant equals beta^2 - 4 gamma and is gamma-independent
        disc = band_discriminant(n, band)
        assert disc == pytest.approx(beta**2 - 4 * gam, abs=1e-12)
        assert band_discriminant(n, shifted) == pytest.approx(disc, abs=1e-12)


def test_symmetric_discriminant_value(symmetric_band):
    # (m11-m22)^2 + 4 m12 m21 at n=2: (1/3)^2 - 4/324 = 8/81
    assert band_discriminant(2, symmetric_band) == pytest.approx(8.0 / 81.0, abs=1e-15)
    # mode 1 of this band is an exact double root
    assert band_discriminant(1, symmetric_band) == pytest.approx(0.0, abs=1e-15)


def test_band_speeds_against_eigenvalue_oracle(symmetric_band, rng):
    e = band_speeds(2, symmetric_band)
    assert e.valid
    assert e.c_plus == pytest.approx(math.sqrt(2.0) / 9.0, abs=1e-12)
    assert e.c_minus == pytest.approx(-math.sqrt(2.0) / 9.0, abs=1e-12)
    # independent oracle: det(M(c)) = 0 iff c is an eigenvalue of M(0)
    for _ in range(20):
        band = random_band(rng)
        n = int(rng.integers(1, 60))
        entry = band_speeds(n, band)
        if not entry.valid:
            continue
        eig = np.sort(np.linalg.eigvals(band_matrix(n, 0.0, band).matrix()).real)
        assert entry.c_minus == pytest.approx(eig[0], abs=1e-10)
        assert entry.c_plus == pytest.approx(eig[1], abs=1e-10)
        assert entry.c_plus >= entry.c_minus


def test_band_speeds_root_and_vieta(rng):
    for _ in range(50):
        band = random_band(rng)
        for n in (1, 2, 3, 17, 64):
            entry = band_speeds(n, band)
            beta, gam = band_det_coeffs(n, band)
            if not entry.valid:
                continue
            assert abs(band_matrix(n, entry.c_plus, band).det()) < 1e-10
            assert abs(band_matrix(n, entry.c_minus, band).det()) < 1e-10
            assert entry.c_plus + entry.c_minus == pytest.approx(beta, abs=1e-12)
            assert entry.c_plus * entry.c_minus == pytest.approx(gam, abs=1e-10)


def test_band_speeds_gamma_shift(symmetric_band):
    shifted = BandState(
        symmetric_band.theta1, symmetric_band.theta2, symmetric_band.omega_n,
        symmetric_band.omega_c, symmetric_band.omega_s, 0.8,
    )
    for n in (2, 3, 9):
        e0 = band_speeds(n, symmetric_band)
        e1 = band_speeds(n, shifted)
        assert e1.c_plus == pytest.approx(e0.c_plus + 0.8, abs=1e-14)
        assert e1.c_minus == pytest.approx(e0.c_minus + 0.8, abs=1e-14)


def test_band_speeds_limits(symmetric_band):
    b = symmetric_band
    lim_plus = b.gamma + b.omega_s / (2 * math.sin(b.theta2 / 2) ** 2)
    lim_minus = b.gamma - b.omega_n / (2 * math.cos(b.theta1 / 2) ** 2)
    e = band_speeds(5000, b)
    limits = sorted([lim_plus, lim_minus])
    assert e.c_minus == pytest.approx(limits[0], abs=1e-3)
    assert e.c_plus == pytest.approx(limits[1], abs=1e-3)


def test_find_threshold(symmetric_band):
    # mode 1 is an exact double root and the |.| argument flips sign there,
    # so the clean tail starts at 2 on the symmetric example
    assert find_threshold_n(symmetric_band, 64) == 2
    band = degenerate_band(math.pi / 3, math.pi / 2, 1.0)
    n_thresh = find_threshold_n(band, 128)
    assert n_thresh is not None
    for n in range(n_thresh, 129):
        assert band_speeds(n, band).valid
    with pytest.raises(DomainError):
        find_threshold_n(symmetric_band, 0)


def test_degenerate_family_identities(rng):
    for theta1, theta2, omega_n in [
        (math.pi / 3, math.pi / 2, 1.0),
        (math.pi / 3, 5 * math.pi / 6, -1.0),
        (0.7, 2.2, 2.0),
        (1.1, 1.9, -0.5),
    ]:
        band = degenerate_band(theta1, theta2, omega_n)
        assert band.omega_c == pytest.approx(
            band.omega_n + band.omega_s, abs=1e-12
        )
        assert band.omega_n * band.omega_s < 0.0
        assert band.omega_n - band.omega_c == pytest.approx(-band.omega_s, abs=1e-12)
        assert band.omega_c - band.omega_s == pytest.approx(band.omega_n, abs=1e-12)
        for n in (1, 2, 7, 40, 256, 512):
            disc = band_discriminant(n, band)
            assert disc > 0.0
            # condition-2 closed form with the determinant-consistent factor 4
            coup = coupling_factor(n, theta1, theta2) ** 2
            expected = (
                band.omega_c**2 - 4.0 * band.omega_n * band.omega_s * coup
            ) / (4.0 * n * n)
            assert disc == pytest.approx(expected, abs=1e-13)


def test_nondegeneracy_classification(symmetric_band):
    assert nondegeneracy_case(symmetric_band).kind == "condition1"
    # omega_n > 0, theta2 < pi - theta1 makes omega_c > 0: H1+ (and H2- here)
    band = degenerate_band(math.pi / 3, math.pi / 2, 1.0)
    case = nondegeneracy_case(band)
    assert case.kind == "condition2"
    assert "H1+" in case.labels
    # omega_n < 0, theta2 > pi - theta1 keeps omega_c > 0: H1-
    band = degenerate_band(math.pi / 3, 5 * math.pi / 6, -1.0)
    case = nondegeneracy_case(band)
    assert "H1-" in case.labels
    # omega_n > 0, theta2 > pi - theta1 flips omega_c < 0: H3+
    band = degenerate_band(math.pi / 3, 5 * math.pi / 6, 1.0)
    assert "H3+" in nondegeneracy_case(band).labels
    # omega_n < 0, omega_c < 0: H3-
    band = degenerate_band(math.pi / 3, math.pi / 2, -1.0)
    assert "H3-" in nondegeneracy_case(band).labels


def test_collision_scan(symmetric_band):
    assert collision_scan(symmetric_band, 2, 50) == []
    assert collision_scan(symmetric_band, 2, 0) == []
    # diagnostic path: a huge tolerance reports near-coincidences
    records = collision_scan(symmetric_band, 2, 3, tol=1.0)
    assert records and all(r.k >= 1 for r in records)


def test_collision_scan_detects_engineered_collision():
    # On the condition-2 family with omega_n < 0, omega_c > 0 and H2+ violated
    # (2cos^2(theta1/2) < sin^2(theta2/2)), the equation c_m^+ = c_{2m}^- has
    # solutions; bisect theta1 until the gap crosses zero, then scan.
    theta2 = 2.6
    m = 6

    def gap(theta1):
        band = degenerate_band(theta1, theta2, -1.0)
        return band_speeds(m, band).c_plus - band_speeds(2 * m, band).c_minus

    lo, hi = 0.3, 2.45
    assert gap(lo) * gap(hi) < 0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if gap(lo) * gap(mid) <= 0:
            hi = mid
        else:
            lo = mid
    band = degenerate_band(0.5 * (lo + hi), theta2, -1.0)
    records = collision_scan(band, m, 4)
    assert any(r.kind == "plus_vs_minus" and r.k == 2 for r in records)


def test_admissible_region_scan():
    pts = admissible_region_scan(32, "both")
    assert all(p.theta1 < p.theta2 for p in pts)
    # the symmetric example couple lies in both regions
    target = min(
        pts, key=lambda p: (p.theta1 - math.pi / 3) ** 2 + (p.theta2 - 2 * math.pi / 3) ** 2
    )
    assert target.fig1a and target.fig1b
    only_a = admissible_region_scan(32, "fig1a")
    assert all(p.fig1a for p in only_a)
    with pytest.raises(DomainError):
        admissible_region_scan(8)
    with pytest.raises(DomainError):
        admissible_region_scan(32, "fig1c")
