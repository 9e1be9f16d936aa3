"""Bundled invariant suite run by ``symopt selftest``.

Each check computes one residual from an analytically known identity and
compares it with a tolerance.  The whole suite runs in well under a minute
on the default grids.
"""
import math
import os
import time
import warnings
from dataclasses import dataclass

import numpy as np

from . import field as fld
from . import phase_space as ps
from . import symplectic as sym
from . import transforms as tr
from . import wavelets as wv
from .special import bessel_j, hermite_gaussian, hermite_gaussian_all


@dataclass
class CheckResult:
    name: str
    residual: float
    tol: float
    seconds: float

    @property
    def passed(self):
        return bool(np.isfinite(self.residual) and self.residual <= self.tol)


def _rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


def _gauss(grid, x0=0.0, k0=0.0):
    x = grid.x
    return fld.Field1D(grid, math.pi ** -0.25 * np.exp(-0.5 * (x - x0) ** 2 + 1j * k0 * x))


def check_hermite_orthonormality():
    g = fld.Grid1D.centered(512, 0.05)
    basis = hermite_gaussian_all(20, g.x)
    gram = basis @ basis.T * g.dx
    return float(np.max(np.abs(gram - np.eye(21)))), 1e-12


def check_bessel():
    # J_0(1), J_1(2.5) and J_5(10) to 16 digits
    ref = [(0, 1.0, 0.7651976865579666), (1, 2.5, 0.4970941024642741),
           (5, 10.0, -0.2340615281867936)]
    return max(abs(float(bessel_j(m, x)) - v) for m, x, v in ref), 1e-13


def check_sr_roundtrip():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(20):
        m1, m2 = sym.random_unimodular(rng), sym.random_unimodular(rng)
        via_sr = sym.from_sr(sym.sr_compose(sym.to_sr(m2), sym.to_sr(m1)))
        worst = max(worst, float(np.max(np.abs(via_sr.as_array()
                                                - sym.compose(m2, m1).as_array()))))
    return worst, 1e-12


def check_field_io():
    import io
    g = fld.Grid1D.centered(64, 0.3)
    f = _gauss(g, 0.3, 1.1)
    buf = io.StringIO()
    fld.write_field(buf, f)
    back = fld.read_field(io.StringIO(buf.getvalue()))
    return float(np.max(np.abs(back.values - f.values))), 0.0


def check_fresnel_group_law():
    rng = np.random.default_rng(3)
    g = fld.Grid1D.centered(512, 0.05)
    f = _gauss(g, 0.4, 0.3)
    worst = 0.0
    for _ in range(5):
        m1 = sym.random_unimodular(rng, min_b=0.5)
        m2 = sym.random_unimodular(rng, min_b=0.5)
        two = tr.fresnel_apply(m2, tr.fresnel_apply(m1, f, method="direct"), method="direct").values
        one = tr.fresnel_apply(sym.compose(m2, m1), f).values
        sign = 1.0 if np.real(np.vdot(one, two)) >= 0 else -1.0
        worst = max(worst, _rel(two, sign * one))
    return worst, 1e-6


def check_frft_eigenmodes():
    g = fld.default_grid()
    worst = 0.0
    for n in range(11):
        f = fld.Field1D(g, hermite_gaussian(n, g.x))
        for alpha in (0.3, 1.0, 2.2):
            worst = max(worst, float(np.max(np.abs(
                tr.frft(alpha, f).values - np.exp(1j * n * alpha) * f.values))))
    return worst, 1e-8


def check_frft_additivity():
    g = fld.default_grid()
    f = _gauss(g, 0.7, -0.4)
    a, b = 0.4, 0.9
    two = tr.frft(a, tr.frft(b, f)).values
    one = tr.frft(a + b, f).values
    return float(np.linalg.norm(two - one) / np.linalg.norm(f.values)), 1e-6


def check_frft_fourier():
    g = fld.default_grid()
    f = _gauss(g, 0.5, 0.8)
    return float(np.max(np.abs(tr.frft(0.5 * math.pi, f).values
                               - tr.fourier_transform(f, sign=1).values))), 1e-8


def check_abcd_law():
    g = fld.Grid1D.centered(512, 0.05)
    q0 = -1j
    f = fld.Field1D(g, np.exp(0.5j * g.x ** 2 / q0))
    m = sym.compose(sym.thin_lens(2.0), sym.free_space(0.7))
    out = tr.fresnel_apply(m, f).values
    q_pred = sym.q_forward(m, q0)
    x = g.x
    core = np.abs(out) > 1e-3 * np.max(np.abs(out))
    logv = np.log(np.abs(out[core])) + 1j * np.unwrap(np.angle(out[core]))
    coef = np.polyfit(x[core] ** 2, logv, 1)[0]
    q_fit = 0.5j / coef
    return abs(q_fit - q_pred) / abs(q_pred), 1e-4


def check_cfrft():
    g = fld.Grid2D.centered(64, 0.25)
    xx, yy = g.mesh()
    f = fld.Field2D(g, np.exp(-0.5 * ((xx - 0.3) ** 2 + (yy + 0.2) ** 2)) / math.sqrt(math.pi))
    two = tr.cfrft(0.5, tr.cfrft(0.6, f)).values
    one = tr.cfrft(1.1, f).values
    return float(np.max(np.abs(two - one))), 1e-6


def check_hankel():
    g = fld.Grid1D(128, 0.0, 0.1)
    u = fld.Field1D(g, np.exp(-0.5 * g.x ** 2))
    return float(np.max(np.abs(tr.hankel(0, u).values - u.values))), 1e-8


def check_tomography_identity():
    g = fld.Grid1D.centered(128, 0.15)
    f = fld.Field1D(g, (hermite_gaussian(1, g.x) + 1j * hermite_gaussian(2, g.x)) / math.sqrt(2.0))
    w = ps.wigner(f)
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(4):
        m = sym.random_unimodular(rng)
        direct = ps.tomogram_direct(f, m)
        worst = max(worst, float(np.max(np.abs(ps.radon_wigner(w, m.d, m.b, g) - direct))))
    return worst, 1e-6


def check_wigner_marginals():
    g = fld.Grid1D.centered(128, 0.15)
    f = fld.Field1D(g, hermite_gaussian(3, g.x - 0.4))
    w = ps.wigner(f)
    marg = np.sum(w.values, axis=1) * w.grid.dy
    return float(np.max(np.abs(marg - np.abs(f.values) ** 2))), 1e-7


def check_inverse_radon():
    g = fld.Grid1D.centered(128, 0.1)
    f = _gauss(g)
    t = ps.tomogram(f, ps.rotation_directions(90))
    rec = ps.inverse_radon(t)
    xx, yy = rec.grid.mesh()
    ref = np.exp(-xx ** 2 - yy ** 2) / math.pi
    err = np.linalg.norm(rec.values - ref) / np.linalg.norm(ref)
    return float(err), 1e-3


def check_husimi():
    g = fld.Grid1D.centered(128, 0.15)
    f = _gauss(g, 0.3, 0.5)
    h = ps.husimi(f, 1.3, fld.Grid1D(2, -0.5, 1.0), fld.Grid1D(2, 0.2, 0.6))
    worst = 0.0
    for i, q in enumerate(h.grid.x):
        for j, p in enumerate(h.grid.y):
            worst = max(worst, abs(ps.husimi_via_wt(f, 1.3, q, p) - h.values[i, j].real))
    return worst, 1e-8


def check_pq_roundtrip():
    g = fld.Grid2D.centered(128, 0.1)
    xx, yy = g.mesh()
    h = fld.Field2D(g, np.exp(-(xx ** 2 + yy ** 2)) * math.sqrt(2.0 / math.pi))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", fld.EdgeDecayWarning)
        back = ps.pq_inverse(ps.pq_transform(h))
    return _rel(back.values, h.values), 1e-5


def check_chirplet():
    return ps.chirplet_to_frft_check(1.0), 5e-3


def check_frac_radon():
    g = fld.Grid2D.centered(96, 0.2)
    xx, yy = g.mesh()
    d0 = 0.3
    f = fld.Field2D(g, np.exp(-0.5 * ((xx - d0) ** 2 + yy ** 2)))
    lam = fld.Grid1D.centered(96, 0.2)
    row = ps.frac_radon(f, 0.5 * math.pi, lam, 0.0)
    ref = math.sqrt(2.0 * math.pi) * np.exp(-0.5 * (lam.x - d0) ** 2)
    return float(np.max(np.abs(row - ref))), 1e-8


def check_wavelet_constants():
    res = abs(wv.c_psi(wv.mexican_hat()) - math.sqrt(math.pi))
    res = max(res, abs(wv.c_psi_prime(wv.lg_psi1()) - 0.5))
    res = max(res, abs(wv.c_psi(wv.hat_psi2()) - wv.c_psi_quad(wv.hat_psi2())))
    return res, 1e-8


def check_wt_parseval():
    g = fld.default_grid()
    f = _gauss(g, 0.0, 3.0)
    w = wv.mexican_hat()
    m = wv.wt_map(f, w, wv.log_scales(1e-2, 1e2, 96))
    ratio = wv.wt_energy(m, w) / (2.0 * wv.c_psi(w) * f.norm() ** 2)
    return abs(ratio - 1.0), 1e-2


def check_wt_inverse():
    g = fld.default_grid()
    f = _gauss(g, 0.5, 3.0)
    w = wv.mexican_hat()
    m = wv.wt_map(f, w, wv.log_scales(1e-2, 1e2, 96))
    rec = wv.wt_inverse(m, w)
    return float(np.linalg.norm(rec.values - f.values) / np.linalg.norm(f.values)), 1e-2


def check_cwt_parseval():
    g = fld.Grid2D.centered(64, 0.25)
    xx, yy = g.mesh()
    f = fld.Field2D(g, np.exp(-0.5 * ((xx - 0.5) ** 2 + yy ** 2) + 2.5j * xx) / math.sqrt(math.pi))
    w = wv.lg_psi1()
    m = wv.cwt_map(f, w, wv.log_scales(1e-2, 1e2, 96))
    ratio = wv.cwt_energy(m) / (wv.c_psi_prime(w) * f.norm() ** 2 / math.pi)
    return abs(ratio - 1.0), 2e-2


def check_determinism():
    g = fld.Grid1D.centered(300, 0.05)
    f = _gauss(g, 0.2, 0.4)
    m = sym.RayMatrix(0.8, 0.9, -0.3, 0.9125)
    rg = fld.Grid1D(200, 0.0, 0.05)
    u = fld.Field1D(rg, rg.x * np.exp(-0.5 * rg.x ** 2))
    saved = os.environ.get("SYMOPT_THREADS")
    try:
        outs = []
        for n in ("1", "3"):
            os.environ["SYMOPT_THREADS"] = n
            outs.append((tr.fresnel_apply(m, f, method="direct").values.tobytes(),
                         tr.hankel(1, u).values.tobytes()))
    finally:
        if saved is None:
            os.environ.pop("SYMOPT_THREADS", None)
        else:
            os.environ["SYMOPT_THREADS"] = saved
    return (0.0 if outs[0] == outs[1] else 1.0), 0.0


CHECKS = [
    ("hermite_orthonormality", check_hermite_orthonormality),
    ("bessel_values", check_bessel),
    ("sr_composition", check_sr_roundtrip),
    ("field_io_roundtrip", check_field_io),
    ("fresnel_group_law", check_fresnel_group_law),
    ("frft_eigenmodes", check_frft_eigenmodes),
    ("frft_additivity", check_frft_additivity),
    ("frft_quarter_is_fourier", check_frft_fourier),
    ("abcd_q_law", check_abcd_law),
    ("cfrft_additivity", check_cfrft),
    ("hankel_involution", check_hankel),
    ("tomography_identity", check_tomography_identity),
    ("wigner_marginal", check_wigner_marginals),
    ("inverse_radon_vacuum", check_inverse_radon),
    ("husimi_two_routes", check_husimi),
    ("pq_roundtrip", check_pq_roundtrip),
    ("chirplet_frft_kernel", check_chirplet),
    ("frac_radon_quarter", check_frac_radon),
    ("wavelet_constants", check_wavelet_constants),
    ("wt_parseval", check_wt_parseval),
    ("wt_inverse", check_wt_inverse),
    ("cwt_parseval", check_cwt_parseval),
    ("thread_determinism", check_determinism),
]


def run_all(report=None):
    """Run every check; ``report`` is called with each :class:`CheckResult`."""
    results = []
    for name, fn in CHECKS:
        t0 = time.perf_counter()
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                residual, tol = fn()
        except Exception:  # a crashing check counts as a failure
            residual, tol = float("nan"), 0.0
        res = CheckResult(name, float(residual), float(tol), time.perf_counter() - t0)
        results.append(res)
        if report is not None:
            report(res)
    return results
