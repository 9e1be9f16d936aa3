import math
import warnings

import numpy as np
import pytest

from symopt import field as fld
from symopt import phase_space as ps
from symopt import symplectic as sym
from symopt import transforms as tr
from symopt.errors import DomainError, InsufficientDataError, RepresentationError
from symopt.special import hermite_gaussian


GRID = fld.Grid1D.centered(128, 0.1)


def state(coeffs, grid=GRID):
    vals = sum(c * hermite_gaussian(n, grid.x) for n, c in enumerate(coeffs))
    f = fld.Field1D(grid, vals)
    return fld.Field1D(grid, vals / f.norm())


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


# -- Wigner -----------------------------------------------------------------

def test_wigner_vacuum():
    w = ps.wigner(state([1]))
    qq, pp = w.grid.mesh()
    assert np.max(np.abs(w.values - np.exp(-qq ** 2 - pp ** 2) / math.pi)) < 1e-8
    assert np.all(np.imag(w.values) == 0)


def test_wigner_off_grid_q():
    f = state([1, 0.5])
    qgrid = fld.Grid1D(40, -2.05, 0.1)
    w = ps.wigner(f, qgrid, GRID)
    ref = ps.wigner(state([1, 0.5], fld.Grid1D(128, -6.45, 0.1)), qgrid, GRID)
    assert np.max(np.abs(w.values - ref.values)) < 1e-8


def test_wigner_marginals_and_bounds():
    f = state([0.6, 0.3 + 0.4j, 0, -0.5j])
    w = ps.wigner(f)
    g = w.grid
    assert np.max(np.abs(w.values.sum(axis=1) * g.dy - np.abs(f.values) ** 2)) < 1e-7
    fp = tr.fourier_transform(f)
    assert np.max(np.abs(w.values.sum(axis=0) * g.dx - np.abs(fp.values) ** 2)) < 1e-7
    assert abs(w.values.sum() * g.dx * g.dy - 1) < 1e-7
    assert np.max(np.abs(w.values)) <= 1 / math.pi + 1e-9


def test_wigner_fock_one_centre():
    probe = fld.Grid1D(3, -0.1, 0.1)
    w = ps.wigner(state([0, 1]), probe, probe)
    assert abs(w.values[1, 1] + 1 / math.pi) < 1e-10


def test_wigner_normalization_warning():
    f = fld.Field1D(GRID, 2 * hermite_gaussian(0, GRID.x))
    with pytest.warns(RuntimeWarning, match="not normalized"):
        ps.wigner(f)


# -- Radon projections and tomograms ---------------------------------------

def test_radon_vacuum_closed_form(rng):
    w = ps.wigner(state([1]))
    for d, b in [(1, 0), (0, -1), (0.6, 1.7), (-2.0, 0.3)]:
        r2 = d * d + b * b
        proj = ps.radon_wigner(w, d, b)
        ref = np.exp(-GRID.x ** 2 / r2) / math.sqrt(math.pi * r2)
        assert np.max(np.abs(proj - ref)) < 1e-6
    with pytest.raises(DomainError):
        ps.radon_wigner(w, 0, 0)


def test_radon_axis_marginals():
    f = state([0.5, 0.5, 0.5j])
    w = ps.wigner(f)
    assert np.max(np.abs(ps.radon_wigner(w, 1, 0) - np.abs(f.values) ** 2)) < 1e-7
    fp = tr.fourier_transform(f)
    assert np.max(np.abs(ps.radon_wigner(w, 0, -1) - np.abs(fp.values) ** 2)) < 1e-7


def test_tomogram_direct_basics():
    f = state([0.3, 1j, 0.2])
    assert np.max(np.abs(ps.tomogram_direct(f, sym.identity()) - np.abs(f.values) ** 2)) < 1e-12
    vac = state([1])
    for th in (0.3, 1.4, 2.5):
        row = ps.tomogram_direct(vac, sym.rotation(th))
        assert np.max(np.abs(row - np.exp(-GRID.x ** 2) / math.sqrt(math.pi))) < 1e-6
        assert abs(row.sum() * GRID.dx - 1) < 1e-6


def test_tomography_identity(rng):
    f = state(rng.normal(size=4) + 1j * rng.normal(size=4))
    w = ps.wigner(f)
    for _ in range(5):
        m = sym.random_unimodular(rng, scale=0.5, min_b=0.3)
        lhs = ps.tomogram_direct(f, m)
        rhs = ps.radon_wigner(w, m.d, m.b)
        assert np.max(np.abs(lhs - rhs)) < 1e-6


def test_radon_composition(rng):
    f = state([0.5, 0.2j, 0.7])
    for _ in range(3):
        m = sym.random_unimodular(rng, scale=0.4, min_b=0.3)
        m2 = sym.random_unimodular(rng, scale=0.4, min_b=0.3)
        lhs = ps.tomogram_direct(f, sym.compose(m, m2))
        moved = tr.fresnel_apply(sym.matrix_inverse(m), f)
        rhs = ps.tomogram_direct(moved, m2)
        assert np.max(np.abs(lhs - rhs)) < 1e-6


def test_tomogram_builder_directions():
    t = ps.tomogram(state([1]), ps.rotation_directions(12))
    assert len(t.directions) == 12
    assert np.allclose([d * d + b * b for d, b in t.directions], 1.0)
    assert np.max(np.abs(t.values.sum(axis=1) * GRID.dx - 1)) < 1e-6


# -- inverse Radon ----------------------------------------------------------

def test_inverse_radon_vacuum_and_fock():
    g = fld.Grid1D.centered(128, 0.1)
    out = fld.Grid2D.centered(41, 0.1)
    qq, pp = out.mesh()
    t = ps.tomogram(state([1], g), ps.rotation_directions(90))
    w = ps.inverse_radon(t, out)
    ref = np.exp(-qq ** 2 - pp ** 2) / math.pi
    assert math.sqrt(np.sum((w.values - ref) ** 2) * out.dx * out.dy) < 1e-3
    t1 = ps.tomogram(state([0, 1], g), ps.rotation_directions(90))
    w1 = ps.inverse_radon(t1, fld.Grid2D.centered(3, 0.1))
    assert abs(w1.values[1, 1] + 1 / math.pi) < 5e-3


def test_inverse_radon_round_trip_smooth_distribution():
    g = fld.Grid2D.centered(96, 0.125)
    qq, pp = g.mesh()
    w = 0.6 * np.exp(-((qq - 0.8) ** 2 + 2 * pp ** 2)) + 0.4 * np.exp(-(qq + 0.5) ** 2 - (pp - 1) ** 2 / 0.5)
    field = fld.Field2D(g, w)
    dirs = ps.rotation_directions(120)
    rows = np.array([ps.radon_wigner(field, d, b) for d, b in dirs])
    t = fld.Tomogram(g.xaxis, tuple(dirs), rows)
    out = fld.Grid2D.centered(33, 0.125)
    rec = ps.inverse_radon(t, out)
    xs, ys = out.mesh()
    exact = 0.6 * np.exp(-((xs - 0.8) ** 2 + 2 * ys ** 2)) + 0.4 * np.exp(-(xs + 0.5) ** 2 - (ys - 1) ** 2 / 0.5)
    err = math.sqrt(np.sum(np.abs(rec.values - exact) ** 2) * out.dx * out.dy)
    assert err < 5e-3


def test_inverse_radon_errors():
    vac = state([1])
    with pytest.raises(InsufficientDataError):
        ps.inverse_radon(ps.tomogram(vac, ps.rotation_directions(4)))
    t = ps.tomogram(vac, ps.rotation_directions(8))
    with pytest.warns(RuntimeWarning, match="recommended"):
        ps.inverse_radon(t, fld.Grid2D.centered(3, 0.1))
    bad = fld.Tomogram(t.xgrid, tuple((2 * d, 2 * b) for d, b in t.directions), t.values)
    with pytest.raises(DomainError):
        ps.inverse_radon(bad)


# -- Husimi -----------------------------------------------------------------

def test_husimi_vacuum_and_positivity():
    h = ps.husimi(state([1]), 1.0)
    qq, pp = h.grid.mesh()
    assert np.max(np.abs(h.values - 0.5 * np.exp(-(qq ** 2 + pp ** 2) / 2))) < 1e-7
    h3 = ps.husimi(state([0, 0, 0, 1]), 0.7)
    assert h3.values.min() >= -1e-9
    with pytest.raises(DomainError):
        ps.husimi(state([1]), 0.0)


@pytest.mark.parametrize("kappa", [0.5, 2.0])
def test_husimi_variance_growth(kappa):
    f = state([1, 0, 0.5], fld.Grid1D.centered(256, 0.1))
    w = ps.wigner(f)
    h = ps.husimi(f, kappa)
    g = w.grid
    q = g.x

    def qvar(vals):
        marg = vals.sum(axis=1)
        m0 = marg.sum()
        mean = (marg * q).sum() / m0
        return (marg * (q - mean) ** 2).sum() / m0

    assert abs(qvar(h.values) - qvar(w.values) - 1 / (2 * kappa)) < 1e-6


def test_husimi_via_wt_matches_smoothing():
    assert abs(ps.husimi_via_wt(state([1]), 1.0, 0.0, 0.0) - 0.5) < 1e-10
    probe = np.linspace(-2.5, 2.5, 16)
    for coeffs in ([1], [0, 1], [1, 1]):
        f = state(coeffs)
        grid = fld.Grid1D(16, probe[0], probe[1] - probe[0])
        ref = ps.husimi(f, 1.3, grid, grid).values
        cf, _ = ps.hermite_coefficients(f)
        got = np.array([[ps.husimi_via_wt(f, 1.3, q, p, coeffs=cf) for p in probe] for q in probe])
        assert np.max(np.abs(got - ref)) < 1e-5
    v = ps.husimi_via_wt(state([1, 0.5]), 0.8, 0.4, 0.0)
    assert v > 0


def test_husimi_via_wt_representation_error():
    x = GRID.x
    f = fld.Field1D(GRID, np.where(np.abs(x) < 1, 1.0, 0.0) / math.sqrt(2))
    with pytest.raises(RepresentationError):
        ps.husimi_via_wt(f, 1.0, 0.0, 0.0)


# -- p-q transform ----------------------------------------------------------

def gauss_pq(g):
    pp, qq = g.mesh()
    return fld.Field2D(g, np.exp(-(pp - 0.3) ** 2 - 0.5 * (qq + 0.2) ** 2 + 0.4j * pp))


def test_pq_round_trip_and_parseval():
    g = fld.Grid2D.centered(96, 0.15)
    h = gauss_pq(g)
    f = ps.pq_transform(h)
    back = ps.pq_inverse(f)
    interior = (slice(24, 72), slice(24, 72))
    assert np.max(np.abs(back.values[interior] - h.values[interior])) < 1e-5
    e_h = np.sum(np.abs(h.values) ** 2) * g.dx * g.dy / math.pi
    e_f = np.sum(np.abs(f.values) ** 2) * g.dx * g.dy / math.pi
    assert abs(e_h - e_f) < 1e-5


def test_pq_point_evaluation_matches_grid():
    g = fld.Grid2D.centered(64, 0.2)
    h = gauss_pq(g)
    f = ps.pq_transform(h)
    assert abs(ps.pq_transform_at(h, g.x[30], g.y[35]) - f.values[30, 35]) < 1e-12
    assert abs(ps.pq_inverse_at(f, g.x[31], g.y[33]) - ps.pq_inverse(f).values[31, 33]) < 1e-12


def test_pq_of_constant_is_constant():
    # on a [-L, L]^2 window the centre value is (2/pi) Si(2 L^2), which is
    # within 1/(pi L^2) of 1; with L = 25.6 that is below 5e-4
    g = fld.Grid2D.centered(1024, 0.05)
    h = fld.Field2D(g, np.ones((1024, 1024), dtype=complex))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", fld.EdgeDecayWarning)
        assert abs(ps.pq_transform_at(h, 0.0, 0.0) - 1) < 1e-3


def test_chirplet_check():
    r256 = ps.chirplet_to_frft_check(0.5 * math.pi, 256, 0.1)
    assert r256 <= 5e-3
    r0 = ps.chirplet_to_frft_check(1.0, 256, 0.1, probes=[0.0])
    assert r0 <= 5e-3
    seq = [ps.chirplet_to_frft_check(1.0, n, 0.05) for n in (256, 512)]
    assert seq[1] < seq[0]
    with pytest.raises(DomainError):
        ps.chirplet_to_frft_check(0.1)


# -- fractional Radon -------------------------------------------------------

def gauss2d(g):
    xx, yy = g.mesh()
    return fld.Field2D(g, np.exp(-((xx - 0.4) ** 2 + (yy + 0.3) ** 2) / 1.5) * (1 + 0.2j * xx))


def test_frac_radon_quarter_turn_is_radon():
    g = fld.Grid2D.centered(96, 0.2)
    f = gauss2d(g)
    lam = g.xaxis
    for th in (0.0, 0.7, 2.1):
        r = ps.frac_radon(f, 0.5 * math.pi, lam, th)
        # the Radon projection with the (cos, sin) direction of the projection coordinate
        ref = ps.radon_wigner(fld.Field2D(g, f.values.real), math.cos(th), -math.sin(th), lam) \
            + 1j * ps.radon_wigner(fld.Field2D(g, f.values.imag), math.cos(th), -math.sin(th), lam)
        assert np.max(np.abs(r - ref)) < 1e-8


def test_frac_radon_brute_force():
    g = fld.Grid2D.centered(64, 0.2)
    f = gauss2d(g)
    alpha, th = 1.1, 0.6
    lam = fld.Grid1D(5, -1.0, 0.5)
    got = ps.frac_radon(f, alpha, lam, th)
    # line integral along lambda e + t e_perp, evaluated analytically in closed form of the sampled Gaussian
    t = np.linspace(-12, 12, 4001)
    e = np.array([math.cos(th), math.sin(th)])
    ep = np.array([-math.sin(th), math.cos(th)])
    cot = 1 / math.tan(alpha)
    ref = []
    for l in lam.x:
        x = l * e[0] + t * ep[0]
        y = l * e[1] + t * ep[1]
        fv = np.exp(-((x - 0.4) ** 2 + (y + 0.3) ** 2) / 1.5) * (1 + 0.2j * x)
        ph = np.exp(0.5j * cot * (x * x + y * y - l * l))
        ref.append(np.trapezoid(fv * ph, t))
    assert np.max(np.abs(got - np.array(ref))) < 1e-6
    zero = fld.Field2D(g, np.zeros((64, 64)))
    assert np.all(ps.frac_radon(zero, alpha, lam, th) == 0)
    with pytest.raises(DomainError):
        ps.frac_radon(f, math.pi, lam, th)


def test_frac_radon_round_trip():
    g = fld.Grid2D.centered(64, 0.2)
    xx, yy = g.mesh()
    f = fld.Field2D(g, np.exp(-((xx - 0.4) ** 2 + (yy + 0.3) ** 2) / 1.5) + 0j)
    alpha = math.pi / 3
    thetas = math.pi * np.arange(128) / 128
    proj = ps.frac_radon(f, alpha, g.xaxis, thetas)
    rec = ps.frac_radon_inverse(proj, thetas, g.xaxis, alpha, g)
    err = math.sqrt(np.sum(np.abs(rec.values - f.values) ** 2) * g.dx * g.dy) / f.norm()
    assert err < 1e-2
    zero = ps.frac_radon_inverse(np.zeros_like(proj), thetas, g.xaxis, alpha, g)
    assert np.all(zero.values == 0)
    with pytest.raises(InsufficientDataError):
        ps.frac_radon_inverse(proj[:32], thetas[:32], g.xaxis, alpha, g)
