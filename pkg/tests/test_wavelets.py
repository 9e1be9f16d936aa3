import cmath
import math
import warnings

import numpy as np
import pytest

from symopt import field as fld
from symopt import wavelets as wv
from symopt.errors import DomainError, ParseError

PI14 = math.pi ** -0.25


def packet(grid, x0=0.0, k0=3.0, w=1.0):
    x = grid.x
    vals = np.exp(-0.5 * ((x - x0) / w) ** 2 + 1j * k0 * x)
    f = fld.Field1D(grid, vals)
    return fld.Field1D(grid, vals / f.norm())


@pytest.fixture
def rng():
    return np.random.default_rng(99)


# -- mother wavelets --------------------------------------------------------

def test_closed_forms():
    x = np.linspace(-4, 4, 81)
    gauss = np.exp(-x * x / 2)
    hat = wv.mexican_hat()
    assert abs(wv.wavelet_eval(hat, 0.0) - PI14) < 1e-15
    assert np.max(np.abs(wv.wavelet_eval(hat, np.array([-1.0, 1.0])))) < 1e-15
    assert np.max(np.abs(hat(x) - PI14 * gauss * (1 - x * x))) < 1e-12
    assert np.max(np.abs(wv.hat_psi2()(x) - 2 * PI14 * gauss * (2 * x ** 4 - 7 * x ** 2 + 1))) < 1e-10
    ref3 = PI14 * gauss * (-8 * x ** 6 + 76 * x ** 4 - 134 * x ** 2 + 26)
    assert np.max(np.abs(wv.hat_psi3()(x) - ref3)) < 1e-10


def test_admissibility():
    alg, num = wv.admissibility_residual(wv.mexican_hat())
    assert alg == 0 and abs(num) <= 1e-10
    alt = wv.MotherWavelet1D((-1.0, 0.0, -2.0, 0.0, 1.0))
    for w in (wv.hat_psi2(), wv.hat_psi3(), alt):
        alg, num = wv.admissibility_residual(w)
        assert alg == 0 and abs(num) < 1e-9
    assert wv.hat_psi3().algebraic_residual == 1 + 2 + 12 - 15
    lone = wv.MotherWavelet1D((1.0,), strict=False)
    assert wv.admissibility_residual(lone)[0] == 1.0
    assert not lone.admissible
    with pytest.raises(DomainError):
        wv.MotherWavelet1D((1.0,))
    with pytest.raises(DomainError):
        wv.MotherWavelet1D((0.0,) * 62)


def test_wavelet_properties():
    hat = wv.mexican_hat()
    assert hat.parity == 1
    assert wv.MotherWavelet1D((0.0, 1.0)).parity == -1
    assert wv.MotherWavelet1D((0.5, 1.0, -0.5)).parity is None
    assert abs(hat.norm - math.sqrt(0.75)) < 1e-15
    g = fld.default_grid()
    assert abs(math.sqrt(np.sum(hat(g.x) ** 2) * g.dx) - hat.norm) < 1e-12


def test_psi_hat_is_fourier_transform():
    g = fld.Grid1D.centered(512, 0.05)
    for w in (wv.mexican_hat(), wv.hat_psi2(), wv.MotherWavelet1D((0.0, 1.0, 0.0, 2.0))):
        p = np.linspace(-3, 3, 13)
        direct = np.exp(-1j * np.outer(p, g.x)) @ w(g.x) * g.dx / math.sqrt(2 * math.pi)
        assert np.max(np.abs(direct - wv.psi_hat(w, p))) < 1e-12


# -- admissibility constant -------------------------------------------------

def test_c_psi_values():
    hat = wv.mexican_hat()
    assert abs(wv.c_psi(hat) - math.sqrt(math.pi)) < 1e-6
    assert abs(wv.c_psi(hat.scaled(2.0)) - 4 * wv.c_psi(hat)) < 1e-12
    for w in (hat, wv.hat_psi2(), wv.hat_psi3()):
        c = wv.c_psi(w)
        assert 0 < c < np.inf
        assert abs(wv.c_psi_quad(w) - c) < 1e-6 * max(1.0, c)
        assert abs(wv.c_psi_log(w) - c) < 1e-8 * max(1.0, c)
    with pytest.raises(DomainError):
        wv.c_psi(wv.MotherWavelet1D((1.0,), strict=False))


# -- real wavelet transform -------------------------------------------------

def test_wt_matched_filter():
    g = fld.default_grid()
    hat = wv.mexican_hat()
    s0 = 1.3
    f = fld.Field1D(g, hat(g.x - s0))
    vals = [abs(wv.wt(f, hat, 1.0, s)) for s in g.x]
    assert abs(g.x[int(np.argmax(vals))] - s0) <= g.dx + 1e-12


def test_wt_constant_and_linearity(rng):
    g = fld.default_grid()
    hat = wv.mexican_hat()
    one = fld.Field1D(g, np.ones(g.n))
    assert abs(wv.wt(one, hat, 1.0, 0.0)) < 1e-6
    a, b = 0.7 - 0.2j, -1.1
    f = packet(g, 0.5, 2.0)
    h = packet(g, -1.0, 4.0, 0.7)
    comb = fld.Field1D(g, a * f.values + b * h.values)
    for mu, s in [(0.5, 0.1), (2.0, -1.0)]:
        lhs = wv.wt(comb, hat, mu, s)
        assert abs(lhs - (a * wv.wt(f, hat, mu, s) + b * wv.wt(h, hat, mu, s))) < 1e-13
    with pytest.raises(DomainError):
        wv.wt(f, hat, 0.0, 0.0)


def test_wt_map_routes_agree():
    g = fld.default_grid()
    f = packet(g, 0.4, 2.5)
    w = wv.hat_psi2()
    scales = wv.log_scales(0.5, 4.0, 7)
    shifts = fld.Grid1D.centered(21, 0.25)
    spec = wv.wt_map(f, w, scales, shifts)
    direct = wv.wt_map(f, w, scales, shifts, method="direct")
    assert np.max(np.abs(spec.values - direct.values)) < 1e-9
    single = wv.wt(f, w, scales[3], shifts.x[5]) / w.norm
    assert abs(direct.values[3, 5] - single) < 1e-12
    zero = wv.wt_map(fld.Field1D(g, np.zeros(g.n)), w, scales, shifts)
    assert np.all(zero.values == 0)


def test_mirror_rows_from_parity():
    g = fld.default_grid()
    f = packet(g, 0.4, 2.5)
    scales = wv.log_scales(0.5, 4.0, 5)
    for w in (wv.mexican_hat(), wv.MotherWavelet1D((0.0, 1.0))):
        m = wv.wt_map(f, w, scales, mirror=True)
        assert np.max(np.abs(m.mirror - w.parity * m.values)) < 1e-10


def _ridge_signal():
    g = fld.Grid1D.centered(1024, 0.05)
    return fld.Field1D(g, np.cos(math.pi * g.x) * np.exp(-g.x ** 2 / 800))


def test_ridges():
    f = _ridge_signal()
    shifts = fld.Grid1D.centered(5, 0.5)
    scales = wv.log_scales(0.05, 5.0, 200)
    m1 = wv.wt_map(f, wv.mexican_hat(), scales, shifts)
    r1 = wv.ridge_maxima(m1, 2)
    assert len(r1) == 1
    assert abs(r1[0] - math.sqrt(2.5) / math.pi) < 0.01
    m2 = wv.wt_map(f, wv.hat_psi2(), scales, shifts)
    assert len(wv.ridge_maxima(m2, 2)) == 2


# -- Parseval and inversion -------------------------------------------------

def test_wt_parseval_random_band_limited(rng):
    g = fld.default_grid()
    w = wv.mexican_hat()
    m_scales = wv.log_scales(1e-2, 1e2, 96)
    for _ in range(3):
        vals = sum(rng.normal() * packet(g, rng.uniform(-3, 3), rng.uniform(2, 5)).values
                   for _ in range(3))
        f = fld.Field1D(g, vals)
        ratio = wv.wt_energy(wv.wt_map(f, w, m_scales), w) / (2 * wv.c_psi(w) * f.norm() ** 2)
        assert abs(ratio - 1) < 1e-2


def test_wt_parseval_cross_term(rng):
    g = fld.default_grid()
    w = wv.hat_psi2()
    f = packet(g, 0.3, 3.0)
    h = packet(g, -0.2, 3.5, 1.3)
    scales = wv.log_scales(1e-2, 1e2, 96)
    mf, mh = wv.wt_map(f, w, scales), wv.wt_map(h, w, scales)
    lw = wv._log_weights(scales) / scales
    cross = 2 * np.sum(lw * np.sum(np.conj(mf.values) * mh.values, axis=1)) * g.dx / mf.weight ** 2
    inner = np.sum(np.conj(f.values) * h.values) * g.dx
    assert abs(cross / (2 * wv.c_psi(w)) - inner) < 1e-2 * abs(inner)


def test_parseval_truncation_order():
    g = fld.default_grid()
    f = packet(g, 0.0, 3.0)
    w = wv.mexican_hat()
    target = 2 * wv.c_psi(w) * f.norm() ** 2
    errs = []
    for dec in (0.5, 1.0, 2.0):
        m = wv.wt_map(f, w, wv.log_scales(10 ** -dec, 10 ** dec, int(48 * dec) + 2))
        errs.append(abs(wv.wt_energy(m, w) / target - 1))
    assert errs[1] <= 0.5 * errs[0]
    assert errs[2] <= 0.5 * errs[1]


def test_wt_inverse_round_trip():
    g = fld.default_grid()
    f = packet(g, 0.5, 3.0)
    w = wv.mexican_hat()
    m = wv.wt_map(f, w, wv.log_scales(1e-2, 1e2, 96))
    rec = wv.wt_inverse(m, w)
    assert np.linalg.norm(rec.values - f.values) / np.linalg.norm(f.values) < 1e-2
    zero = wv.WTMap(m.scales, m.shifts, np.zeros_like(m.values))
    assert np.all(wv.wt_inverse(zero, w).values == 0)


def test_wt_inverse_warns_on_coverage():
    g = fld.default_grid()
    f = packet(g)
    w = wv.mexican_hat()
    m = wv.wt_map(f, w, wv.log_scales(0.1, 10.0, 30))
    with pytest.warns(RuntimeWarning, match="truncation bound"):
        wv.wt_inverse(m, w)


def test_reproducing_kernel_off_diagonal():
    w = wv.mexican_hat()
    diag = wv.reproducing_kernel(w, 0.0, 0.0)
    for d in (1.0, 2.5, 4.0):
        assert abs(wv.reproducing_kernel(w, 0.0, d)) <= 1e-3 * diag


def test_wtmap_io(tmp_path):
    g = fld.default_grid()
    m = wv.wt_map(packet(g), wv.mexican_hat(), wv.log_scales(0.1, 10, 9), fld.Grid1D.centered(11, 0.5))
    path = tmp_path / "map.txt"
    wv.write_wtmap(path, m)
    back = wv.read_wtmap(path)
    assert back.weight is None
    assert np.max(np.abs(back.scales - m.scales)) < 1e-12 * m.scales.max()
    assert np.array_equal(back.values, m.values)
    assert path.read_text().splitlines()[0].startswith("WTMAP 9 11 ")
    bad = tmp_path / "bad.txt"
    bad.write_text("WTMAP 2 2 1\n")
    with pytest.raises(ParseError):
        wv.read_wtmap(bad)


# -- complex wavelets -------------------------------------------------------

def test_lg_closed_forms(rng):
    eta = rng.normal(size=20) + 1j * rng.normal(size=20)
    t = np.abs(eta) ** 2
    assert abs(wv.cwt_mother_eval(wv.lg_psi1(), 0.0) - 1.0) < 1e-15
    assert np.max(np.abs(wv.lg_psi1()(eta) - (1 - t / 2) * np.exp(-t / 2))) < 1e-12
    assert np.max(np.abs(wv.lg_psi2()(eta) - (6 - 7 * t + t * t) * np.exp(-t / 2))) < 1e-10
    ref3 = (14 - 31 * t + 12 * t ** 2 - t ** 3) * np.exp(-t / 2)
    assert np.max(np.abs(wv.lg_psi3()(eta) - ref3)) < 1e-10
    rot = eta * np.exp(1j * rng.uniform(0, 2 * math.pi, size=20))
    for w in (wv.lg_psi1(), wv.lg_psi2(), wv.lg_psi3()):
        assert np.array_equal(w(rot), w(eta)) or np.max(np.abs(w(rot) - w(eta))) < 1e-14


def test_lg_admissibility():
    for k in ((0.5, 0.5), (1, 3, 1), (1, 1, 3, 1)):
        assert wv.MotherWaveletC(k).algebraic_residual == 0
    assert wv.MotherWaveletC((1, 1, 3, 3), strict=False).algebraic_residual == 1 - 1 + 6 - 18
    with pytest.raises(DomainError):
        wv.MotherWaveletC((1, 1, 3, 3))


def test_mother_ft_is_fourier_transform():
    g = fld.Grid2D.centered(96, 0.2)
    for w in (wv.lg_psi1(), wv.lg_psi2()):
        vals = w(g.eta())
        for xi in (0.0, 0.7 + 0.2j, -1.3j):
            ft = np.sum(vals * np.exp(-1j * (xi.real * g.eta().real + xi.imag * g.eta().imag))) \
                * g.dx * g.dy / (2 * math.pi)
            assert abs(ft - wv.cwt_mother_ft(w, xi)) < 1e-10


def test_c_psi_prime():
    assert abs(wv.c_psi_prime(wv.lg_psi1()) - 0.5) < 1e-8
    assert abs(wv.c_psi_prime(wv.MotherWaveletC((1.0, 1.0))) - 4 * 0.5) < 1e-12
    for w in (wv.lg_psi2(), wv.lg_psi3()):
        c = wv.c_psi_prime(w)
        assert c > 0
        assert abs(wv.c_psi_prime_quad(w) - c) < 1e-6 * max(1.0, c)
    with pytest.raises(DomainError):
        wv.c_psi_prime(wv.MotherWaveletC((1.0, 0.0), strict=False))


def gauss2d(g, cx=0.0, cy=0.0, k=2.5):
    xx, yy = g.mesh()
    return fld.Field2D(g, np.exp(-0.5 * ((xx - cx) ** 2 + (yy - cy) ** 2) + 1j * k * xx) / math.sqrt(math.pi))


def test_cwt_matched_filter_and_map():
    g = fld.Grid2D.centered(64, 0.25)
    w = wv.lg_psi1()
    k0 = 0.75 - 0.5j
    f = fld.Field2D(g, w(g.eta() - k0))
    m = wv.cwt_map(f, w, [1.0])
    idx = np.unravel_index(np.argmax(np.abs(m.values[0])), (g.nx, g.ny))
    assert abs(g.eta()[idx] - k0) <= math.hypot(g.dx, g.dy)
    for i, j in [(20, 30), (32, 32), (40, 25)]:
        assert abs(m.values[0][i, j] - wv.cwt(f, w, 1.0, g.eta()[i, j])) < 1e-10
    with pytest.raises(DomainError):
        wv.cwt(f, w, 0.0, 0.0)


def test_cwt_parseval_and_inverse():
    g = fld.Grid2D.centered(64, 0.25)
    f = gauss2d(g, 0.5, 0.0)
    for w in (wv.lg_psi1(), wv.lg_psi2()):
        m = wv.cwt_map(f, w, wv.log_scales(1e-2, 1e2, 96))
        ratio = wv.cwt_energy(m) / (wv.c_psi_prime(w) * f.norm() ** 2 / math.pi)
        assert abs(ratio - 1) < 2e-2
        rec = wv.cwt_inverse(m, w)
        err = np.linalg.norm(rec.values - f.values) / np.linalg.norm(f.values)
        assert err < 2e-2


# -- symplectic wavelet transform ------------------------------------------

def skew_mother(z):
    return (z + 0.4 * z * z) * np.exp(-0.5 * np.abs(z) ** 2)


def test_swt_reduces_to_overlap():
    g = fld.Grid2D.centered(64, 0.25)
    f = gauss2d(g, 0.3, -0.2, 1.0)
    w = wv.lg_psi1()
    plain = np.sum(f.values * np.conj(w(g.eta()))) * g.dx * g.dy / math.pi
    assert abs(wv.swt(f, w, 1.0, 0.0, 0.0) - plain) < 1e-14
    assert abs(wv.swt(f, w, 1.0, 0.0, 0.0) - wv.cwt(f, w, 1.0, 0.0)) < 1e-14


def test_swt_rotation_oracle():
    g = fld.Grid2D.centered(96, 0.2)
    theta = 0.7
    s = cmath.exp(1j * theta)
    eta = g.eta()
    f = fld.Field2D(g, np.exp(-0.5 * np.abs(eta - (0.6 + 0.3j)) ** 2))
    got = wv.swt(f, skew_mother, s, 0.0, 0.0)
    # substitute w = e^{i theta} z: the signal is rotated back, the mother stays fixed
    rotated = np.exp(-0.5 * np.abs(eta * np.conj(s) - (0.6 + 0.3j)) ** 2)
    ref = np.conj(cmath.sqrt(np.conj(s))) * np.sum(rotated * np.conj(skew_mother(eta))) * g.dx * g.dy / math.pi
    assert abs(got - ref) < 1e-8


def test_swt_linearity_and_invariant():
    g = fld.Grid2D.centered(64, 0.25)
    f = gauss2d(g, 0.3, 0.1)
    h = gauss2d(g, -0.5, 0.4, -1.0)
    s, r = math.cosh(0.4) * cmath.exp(0.3j), math.sinh(0.4) * cmath.exp(-1.1j)
    comb = fld.Field2D(g, 2 * f.values - 0.5j * h.values)
    w = wv.lg_psi2()
    lhs = wv.swt(comb, w, s, r, 0.2 - 0.1j)
    rhs = 2 * wv.swt(f, w, s, r, 0.2 - 0.1j) - 0.5j * wv.swt(h, w, s, r, 0.2 - 0.1j)
    assert abs(lhs - rhs) < 1e-12
    with pytest.raises(DomainError):
        wv.swt(f, w, 1.0, 0.5, 0.0)


def test_swt_sampled_mother():
    g = fld.Grid2D.centered(64, 0.25)
    f = gauss2d(g, 0.3, 0.1)
    w = wv.lg_psi1()
    sampled = fld.Field2D(g, w(g.eta()).astype(complex))
    s, r = math.cosh(0.3), math.sinh(0.3)
    assert abs(wv.swt(f, sampled, s, r, 0.1) - wv.swt(f, w, s, r, 0.1)) < 1e-8
