"""Hermite-Gaussian mother wavelets, the real wavelet transform with its
Parseval identity and inversion, Laguerre-Gaussian complex wavelets (CWT)
and the symplectic wavelet transform (SWT).

Conventions
-----------
* A real mother wavelet is stored through coefficients g_n of the Fock
  expansion sum g_n a^{+n}|0>, so psi(x) = sum g_n sqrt(n!) psi_n(x) with
  psi_n the normalized Hermite-Gaussian functions.
* Fourier transforms are unitary, psi^(p) = (2pi)^{-1/2} integral e^{-ipx} psi(x) dx,
  so psi_n^ = (-i)^n psi_n.
* C_psi = 2pi integral_0^inf |psi^(p)|^2 / p dp.  With W(mu, s) =
  |mu|^{-1/2} integral f(x) psi*((x - s)/mu) dx the energy identity reads
  integral_{-inf}^{inf} dmu/mu^2 integral ds |W|^2 = 2 C_psi ||f||^2.
* Complex (Laguerre-Gaussian) wavelets psi(eta) = e^{-|eta|^2/2} sum n! K_n L_n(|eta|^2)
  have the unitary 2D Fourier transform
  psi~(xi) = e^{-|xi|^2/2} sum K_n H_{n,n}(|xi|, |xi|) = e^{-|xi|^2/2} sum (-1)^n n! K_n L_n(|xi|^2)
  and C'_psi = 4 integral_0^inf |psi~(rho)|^2 / rho d rho.
"""
import cmath
import math
import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np
from numpy.polynomial import hermite as npherm
from numpy.polynomial import laguerre as nplag
from numpy.polynomial import polynomial as nppoly
from scipy import integrate

from . import field as fld
from .errors import DomainError, ParseError, ShapeError
from .special import HERMITE_CEILING, hermite_gaussian_all, laguerre
from .symplectic import SRParams

ADMISSIBLE_TOL = 1e-12
MIN_INVERSE_SCALES = 64
DEFAULT_MU_RANGE = (1e-2, 1e2)


def _double_factorial_odd(m):
    """(2m - 1)!! with (-1)!! = 1."""
    out = 1
    for k in range(1, 2 * m, 2):
        out *= k
    return out


def _poly_half_moments(coeffs):
    """sum_j c_j integral_0^inf p^{j-1} e^{-p^2} dp  (requires c_0 = 0)."""
    return sum(c * 0.5 * math.gamma(0.5 * j) for j, c in enumerate(coeffs) if j > 0)


# --------------------------------------------------------------------------
# real wavelets


@dataclass(frozen=True, eq=False)
class MotherWavelet1D:
    """Real mother wavelet from Fock coefficients g_0..g_N.

    Parameters
    ----------
    g : sequence of float
    strict : bool
        When True (default) the admissibility sum
        sum_m g_{2m} (2m-1)!! must vanish within 1e-12 (relative to the
        largest term) or :class:`DomainError` is raised.
    """

    g: tuple
    strict: bool = dc_field(default=True, compare=False)

    def __post_init__(self):
        g = tuple(float(v) for v in self.g)
        if not g:
            raise DomainError("at least one coefficient is required")
        if len(g) - 1 > HERMITE_CEILING:
            raise DomainError(f"degree {len(g) - 1} exceeds the ceiling {HERMITE_CEILING}")
        object.__setattr__(self, "g", g)
        if self.strict and not self.admissible:
            raise DomainError(f"coefficients are not admissible (sum g_2m (2m-1)!! = "
                              f"{self.algebraic_residual:.3e})")

    @property
    def degree(self):
        return len(self.g) - 1

    @property
    def algebraic_residual(self):
        return float(sum(self.g[2 * m] * _double_factorial_odd(m)
                         for m in range((self.degree // 2) + 1)))

    @property
    def admissible(self):
        terms = [abs(self.g[2 * m]) * _double_factorial_odd(m) for m in range((self.degree // 2) + 1)]
        scale = max(terms + [1e-300])
        return abs(self.algebraic_residual) <= ADMISSIBLE_TOL * max(scale, 1.0)

    @property
    def mode_weights(self):
        """Coefficients on the normalized Hermite-Gaussians, g_n sqrt(n!)."""
        return np.array([gn * math.sqrt(math.factorial(n)) for n, gn in enumerate(self.g)])

    @property
    def norm(self):
        """L2 norm sqrt(sum g_n^2 n!)."""
        return float(np.sqrt(np.sum(self.mode_weights ** 2)))

    @property
    def parity(self):
        """+1 (even), -1 (odd) or None (mixed)."""
        odd = any(v != 0 for v in self.g[1::2])
        even = any(v != 0 for v in self.g[0::2])
        if even and odd:
            return None
        return -1 if odd else 1

    def __call__(self, x):
        return wavelet_eval(self, x)

    def scaled(self, c):
        return MotherWavelet1D(tuple(c * v for v in self.g), self.strict)


def mexican_hat():
    """g = (1/2, 0, -1/2): psi(x) = pi^{-1/4} e^{-x^2/2} (1 - x^2)."""
    return MotherWavelet1D((0.5, 0.0, -0.5))


def hat_psi2():
    """g = (-2, 0, -1, 0, 1): psi(x) = 2 pi^{-1/4} e^{-x^2/2} (2x^4 - 7x^2 + 1)."""
    return MotherWavelet1D((-2.0, 0.0, -1.0, 0.0, 1.0))


def hat_psi3():
    """g = (1, 0, 2, 0, 4, 0, -1): psi(x) = pi^{-1/4} e^{-x^2/2} (-8x^6 + 76x^4 - 134x^2 + 26)."""
    return MotherWavelet1D((1.0, 0.0, 2.0, 0.0, 4.0, 0.0, -1.0))


def wavelet_eval(w, x):
    """psi(x) = sum g_n sqrt(n!) psi_n(x); complex x gives the analytic continuation."""
    x = np.asarray(x)
    modes = hermite_gaussian_all(w.degree, x)
    return np.tensordot(w.mode_weights, modes, axes=1)


def psi_hat(w, p):
    """Unitary Fourier transform psi^(p) = sum g_n sqrt(n!) (-i)^n psi_n(p)."""
    p = np.asarray(p, dtype=float)
    modes = hermite_gaussian_all(w.degree, p)
    phase = (-1j) ** np.arange(w.degree + 1)
    return np.tensordot(w.mode_weights * phase, modes, axes=1)


def _psi_hat_poly(w):
    """Coefficients (increasing powers) of Q with psi^(p) = pi^{-1/4} e^{-p^2/2} Q(p)."""
    herm = np.array([gn * (-1j) ** n / 2.0 ** (0.5 * n) for n, gn in enumerate(w.g)])
    return npherm.herm2poly(herm)


def admissibility_residual(w, grid=None):
    """(algebraic, numeric): sum g_{2m}(2m-1)!! and the quadrature of integral psi dx."""
    grid = fld.default_grid() if grid is None else grid
    numeric = float(np.sum(wavelet_eval(w, grid.x)) * grid.dx)
    return w.algebraic_residual, numeric


def c_psi(w):
    """Admissibility constant 2pi integral_0^inf |psi^(p)|^2 / p dp.

    |psi^|^2 is pi^{-1/2} e^{-p^2} times a polynomial, so the integral is a
    finite sum of half-Gaussian moments.

    Raises
    ------
    DomainError
        When |psi^(0)| != 0 (the integral diverges at p = 0).
    """
    q = _psi_hat_poly(w)
    mod2 = nppoly.polymul(q, np.conj(q)).real
    scale = max(1.0, float(np.max(np.abs(mod2))))
    if abs(mod2[0]) > 1e-12 * scale:
        raise DomainError("wavelet is not admissible: C_psi diverges at p = 0")
    return 2.0 * math.pi / math.sqrt(math.pi) * _poly_half_moments(mod2)


def c_psi_quad(w):
    """C_psi by adaptive quadrature of the defining integral (cross-check)."""
    if not w.admissible:
        raise DomainError("wavelet is not admissible: C_psi diverges at p = 0")
    fn = lambda p: abs(complex(psi_hat(w, p))) ** 2 / p if p > 0 else 0.0
    val, _ = integrate.quad(fn, 0.0, np.inf, epsabs=1e-14, epsrel=1e-13, limit=400)
    return 2.0 * math.pi * val


def c_psi_log(w, lo=-12.0, hi=4.0, n=8001):
    """C_psi as 2pi integral |psi^(e^t)|^2 dt on a uniform grid in t = ln p.

    A second parameterization of the same integral, used to check that the
    constant does not depend on the quadrature route.
    """
    t = np.linspace(lo, hi, n)
    vals = np.abs(psi_hat(w, np.exp(t))) ** 2
    return 2.0 * math.pi * float(integrate.simpson(vals, x=t))


def wt(f, w, mu, s):
    """Wavelet transform |mu|^{-1/2} integral f(x) psi*((x - s)/mu) dx (direct quadrature)."""
    if mu == 0:
        raise DomainError("scale mu must be non-zero")
    x = f.grid.x
    kern = np.conj(wavelet_eval(w, (x - s) / mu))
    return complex(np.sum(f.values * kern) * f.grid.dx / math.sqrt(abs(mu)))


@dataclass(frozen=True, eq=False)
class WTMap:
    """Wavelet coefficients W(mu_i, s_j) on a log-spaced scale grid.

    ``values`` holds weight * W with ``weight`` the normalization factor
    applied by :func:`wt_map` (1/||psi|| by default).  ``mirror`` optionally
    holds the coefficients at the negative scales -mu_i.  ``weight`` is None
    for maps read from file, where it is not recorded.
    """

    scales: np.ndarray
    shifts: fld.Grid1D
    values: np.ndarray
    weight: float = None
    mirror: np.ndarray = None

    def __post_init__(self):
        sc = np.asarray(self.scales, dtype=float)
        if sc.ndim != 1 or len(sc) < 1 or np.any(sc <= 0):
            raise DomainError("scales must be a positive 1D array")
        vals = np.array(self.values, dtype=complex)
        if vals.shape != (len(sc), self.shifts.n):
            raise ShapeError(f"expected values of shape {(len(sc), self.shifts.n)}, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise DomainError("wavelet coefficients must be finite")
        object.__setattr__(self, "scales", sc)
        object.__setattr__(self, "values", vals)
        if self.mirror is not None:
            mir = np.array(self.mirror, dtype=complex)
            if mir.shape != vals.shape:
                raise ShapeError("mirror values must match values")
            object.__setattr__(self, "mirror", mir)

    @property
    def mu_ratio(self):
        if len(self.scales) < 2:
            return 1.0
        return float(self.scales[1] / self.scales[0])

    def is_log_spaced(self, rtol=1e-9):
        if len(self.scales) < 2:
            return True
        r = self.scales[1:] / self.scales[:-1]
        return bool(np.all(np.abs(r - r[0]) <= rtol * r[0]))


def log_scales(mu_min, mu_max, n):
    """n log-spaced scales from mu_min to mu_max."""
    if not (0 < mu_min < mu_max) or n < 2:
        raise DomainError("need 0 < mu_min < mu_max and at least two scales")
    return np.geomspace(mu_min, mu_max, n)


def _spectral_axis(f, shifts):
    """p grid for the Fourier route: Nyquist of f, periodic length > twice the data span."""
    x = f.grid.x
    s = shifts.x
    span = max(np.max(np.abs(x)), np.max(np.abs(s))) * 2.0
    dp = 2.0 * math.pi / (2.0 * span)
    pmax = math.pi / f.grid.dx
    npts = int(math.ceil(pmax / dp))
    return dp * np.arange(-npts, npts + 1), dp


def _wt_rows(f, w, scales, shifts, method):
    if method == "direct":
        x = f.grid.x
        out = np.empty((len(scales), shifts.n), dtype=complex)
        for i, mu in enumerate(scales):
            kern = np.conj(wavelet_eval(w, (x[None, :] - shifts.x[:, None]) / mu))
            out[i] = kern @ f.values * f.grid.dx / math.sqrt(abs(mu))
        return out
    if method != "spectral":
        raise DomainError(f"unknown method {method!r}")
    p, dp = _spectral_axis(f, shifts)
    fhat = np.exp(-1j * np.outer(p, f.grid.x)) @ f.values * f.grid.dx / math.sqrt(2.0 * math.pi)
    rows = np.array([math.sqrt(abs(mu)) * fhat * np.conj(psi_hat(w, mu * p)) for mu in scales])
    back = np.exp(1j * np.outer(p, shifts.x)) * dp
    return rows @ back


def wt_map(f, w, scales, shifts=None, normalize=True, method="spectral", mirror=None):
    """Wavelet coefficients over a (scale, shift) grid.

    Parameters
    ----------
    f : Field1D
    w : MotherWavelet1D
    scales : array_like
        Positive scales (log-spaced for use with :func:`wt_inverse`).
    shifts : Grid1D, optional
        Defaults to the grid of f.
    normalize : bool
        Multiply by 1/||psi|| (default), which makes the result independent
        of the overall scale of the coefficients g_n.
    method : {"spectral", "direct"}
        ``"spectral"`` evaluates |mu|^{1/2} integral f^(p) conj(psi^(mu p)) e^{ips} dp,
        exact for band-limited decaying f at every scale; ``"direct"`` sums
        the defining integral on the grid of f (needs mu well above dx).
    mirror : bool, optional
        Also compute the negative scales.  Defaults to True only for
        wavelets without definite parity.
    """
    shifts = f.grid if shifts is None else shifts
    scales = np.asarray(scales, dtype=float)
    if np.any(scales <= 0):
        raise DomainError("scales must be positive; negative scales are the mirror term")
    weight = 1.0 / w.norm if normalize else 1.0
    vals = weight * _wt_rows(f, w, scales, shifts, method)
    mirror = (w.parity is None) if mirror is None else mirror
    mir = weight * _wt_rows(f, w, -scales, shifts, method) if mirror else None
    return WTMap(scales, shifts, vals, weight, mir)


def _log_weights(scales):
    """Trapezoid weights in ln(mu)."""
    t = np.log(scales)
    wts = np.zeros_like(t)
    d = np.diff(t)
    wts[:-1] += 0.5 * d
    wts[1:] += 0.5 * d
    return wts


def _mirror_rows(m, w):
    if m.mirror is not None:
        return m.mirror
    if w.parity is None:
        raise DomainError("wavelet has no definite parity: negative-scale coefficients are needed")
    return w.parity * m.values


def _map_weight(m, w):
    return (1.0 / w.norm) if m.weight is None else m.weight


def wt_energy(m, w):
    """integral_{-inf}^{inf} dmu/mu^2 integral ds |W|^2 over the map's scale range.

    The normalization weight of the map is divided out; negative scales
    come from ``m.mirror`` or, for wavelets of definite parity, from
    W(-mu, s) = parity * W(mu, s).
    """
    wt_ = _log_weights(m.scales) / m.scales
    weight = _map_weight(m, w)
    pos = np.sum(np.abs(m.values) ** 2, axis=1) * m.shifts.dx
    neg = np.sum(np.abs(_mirror_rows(m, w)) ** 2, axis=1) * m.shifts.dx
    return float(np.sum(wt_ * (pos + neg))) / weight ** 2


def truncation_factor(w, p, mu_min, mu_max, n=4001):
    """Fraction of C_psi retained at frequency p by a scale range [mu_min, mu_max].

    T(p) = (2pi / C_psi) integral_{mu_min}^{mu_max} |psi^(mu p)|^2 dmu / mu
    The truncated inversion reproduces f^(p) T(p) and the truncated energy
    is 2 C_psi integral |f^|^2 T dp.
    """
    t = np.linspace(math.log(mu_min), math.log(mu_max), n)
    p = np.atleast_1d(np.abs(np.asarray(p, dtype=float)))
    vals = np.abs(psi_hat(w, np.outer(p, np.exp(t)))) ** 2
    return 2.0 * math.pi / c_psi(w) * integrate.simpson(vals, x=t, axis=-1)


def wt_inverse(m, w, out=None):
    """Reconstruct f from its wavelet coefficients.

    f(x) = (1/2C_psi) integral dmu / (mu^2 |mu|^{1/2}) integral ds psi((x - s)/mu) W(mu, s)

    over both signs of mu, trapezoidal in ln(mu).  The s integral is a
    convolution and is evaluated spectrally,
    integral ds psi((x - s)/mu) W(mu, s) = integral dp e^{ipx} |mu| psi^(mu p) W^(mu, p),
    which stays exact at scales far below the shift spacing.

    Warns (RuntimeWarning) when the scales are not log-spaced, number fewer
    than 64 or do not span [1e-2, 1e2]; the warning quotes the estimated
    truncation bound max |1 - T(p)| over the shift grid band.
    """
    out = m.shifts if out is None else out
    scales = m.scales
    if not m.is_log_spaced():
        warnings.warn("scales are not log-spaced; trapezoid weights in ln(mu) used anyway",
                      RuntimeWarning, stacklevel=2)
    if len(scales) < MIN_INVERSE_SCALES or scales[0] > DEFAULT_MU_RANGE[0] * (1 + 1e-9) \
            or scales[-1] < DEFAULT_MU_RANGE[1] * (1 - 1e-9):
        pband = np.linspace(0.5, math.pi / m.shifts.dx, 64)
        bound = float(np.max(np.abs(1.0 - truncation_factor(w, pband, scales[0], scales[-1]))))
        warnings.warn(f"scale grid ({len(scales)} scales on [{scales[0]:.3g}, {scales[-1]:.3g}]) "
                      f"is below the recommended coverage; estimated truncation bound {bound:.2e}",
                      RuntimeWarning, stacklevel=2)
    weight = _map_weight(m, w)
    c = c_psi(w)
    sx = m.shifts.x
    span = max(np.max(np.abs(sx)), np.max(np.abs(out.x))) * 2.0
    dp = 2.0 * math.pi / (2.0 * span)
    pmax = math.pi / m.shifts.dx
    npts = int(math.ceil(pmax / dp))
    p = dp * np.arange(-npts, npts + 1)
    fwd = np.exp(-1j * np.outer(sx, p)) * m.shifts.dx / math.sqrt(2.0 * math.pi)
    back = np.exp(1j * np.outer(p, out.x)) * dp
    lw = _log_weights(scales)
    acc = np.zeros(len(p), dtype=complex)
    for sign, rows in ((1.0, m.values), (-1.0, _mirror_rows(m, w))):
        spec = rows @ fwd                                   # W^(mu, p)
        for i, mu in enumerate(scales):
            smu = sign * mu
            kern = mu * psi_hat(w, smu * p)
            acc += lw[i] * mu / (mu * mu * math.sqrt(mu)) * kern * spec[i]
    vals = (acc @ back) / (2.0 * c * weight)
    return fld.Field1D(out, vals)


def ridge_maxima(m, shift_index):
    """Scales of the local maxima of |W| along the scale axis at one shift."""
    col = np.abs(m.values[:, shift_index])
    idx = [i for i in range(1, len(col) - 1) if col[i] > col[i - 1] and col[i] >= col[i + 1]]
    return m.scales[idx]


def autocorrelation(w, u, n=4001, half=None):
    """A(u) = integral psi(t) psi(t + u) dt by dense quadrature."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    half = 12.0 + 0.5 * float(np.max(np.abs(u))) if half is None else half
    t = np.linspace(-half, half, n)
    dt = t[1] - t[0]
    a = wavelet_eval(w, t - 0.5 * u[:, None]).real
    b = wavelet_eval(w, t + 0.5 * u[:, None]).real
    return np.sum(a * b, axis=1) * dt


def reproducing_kernel(w, x, x2, mu_min=DEFAULT_MU_RANGE[0], mu_max=DEFAULT_MU_RANGE[1], n=2001):
    """Truncated kernel integral_{mu_min}^{mu_max} dmu/mu^2 integral ds psi_{mu,s}(x) psi_{mu,s}(x2).

    psi_{mu,s}(x) = mu^{-1/2} psi((x - s)/mu).  The s integral equals
    A((x2 - x)/mu) with A the autocorrelation of psi, leaving a single
    integral over ln(mu).  For x != x2 the untruncated value is zero; on the
    diagonal it grows like A(0)/mu_min.
    """
    t = np.linspace(math.log(mu_min), math.log(mu_max), n)
    mu = np.exp(t)
    a = autocorrelation(w, (x2 - x) / mu)
    return float(integrate.simpson(a / mu, x=t))


def write_wtmap(target, m):
    """Write ``WTMAP <nmu> <ns> <mu0> <mu_ratio> <s0> <ds>`` and nmu*ns rows ``<re> <im>``."""
    if not m.is_log_spaced():
        raise DomainError("only log-spaced scale grids can be written")
    fh, close = fld._open_text(target, "w")
    try:
        f17 = fld._fmt
        fh.write(f"WTMAP {len(m.scales)} {m.shifts.n} {f17(m.scales[0])} {f17(m.mu_ratio)} "
                 f"{f17(m.shifts.x0)} {f17(m.shifts.dx)}\n")
        fh.write("".join(f"{f17(v.real)} {f17(v.imag)}\n" for v in m.values.ravel()))
    finally:
        if close:
            fh.close()


def read_wtmap(target):
    """Read a WTMAP file; the normalization weight is not stored (weight=None)."""
    lines = fld._read_lines(target)
    if not lines:
        raise ParseError("empty file", 1)
    head = lines[0].split(" ")
    if head[0] != "WTMAP" or len(head) != 7:
        raise ParseError("expected header 'WTMAP <nmu> <ns> <mu0> <mu_ratio> <s0> <ds>'", 1)
    nmu = fld._parse_int(head[1], 1, "nmu")
    ns = fld._parse_int(head[2], 1, "ns")
    mu0, ratio, s0, ds = fld._parse_floats(head[3:], 1, 4, "header")
    if mu0 <= 0 or ratio <= 0 or ds <= 0:
        raise ParseError("mu0, mu_ratio and ds must be positive", 1)
    vals = fld._read_complex_rows(lines, 1, nmu * ns)
    scales = mu0 * ratio ** np.arange(nmu)
    return WTMap(scales, fld.Grid1D(ns, s0, ds), vals.reshape(nmu, ns))


# --------------------------------------------------------------------------
# complex (Laguerre-Gaussian) wavelets


@dataclass(frozen=True, eq=False)
class MotherWaveletC:
    """Circularly symmetric complex-plane wavelet from diagonal coefficients K_n.

    Admissibility: sum n! K_n (-1)^n = 0 (checked within 1e-12 when
    ``strict``).
    """

    k: tuple
    strict: bool = dc_field(default=True, compare=False)

    def __post_init__(self):
        k = tuple(float(v) for v in self.k)
        if not k:
            raise DomainError("at least one coefficient is required")
        object.__setattr__(self, "k", k)
        if self.strict and not self.admissible:
            raise DomainError(f"coefficients are not admissible (sum n! K_n (-1)^n = "
                              f"{self.algebraic_residual:.3e})")

    @property
    def degree(self):
        return len(self.k) - 1

    @property
    def algebraic_residual(self):
        return float(sum(math.factorial(n) * kn * (-1) ** n for n, kn in enumerate(self.k)))

    @property
    def admissible(self):
        scale = max(abs(math.factorial(n) * kn) for n, kn in enumerate(self.k))
        return abs(self.algebraic_residual) <= ADMISSIBLE_TOL * max(scale, 1.0)

    def radial_poly(self):
        """Coefficients (increasing powers of t = |eta|^2) of sum n! K_n L_n(t)."""
        lag = np.array([math.factorial(n) * kn for n, kn in enumerate(self.k)])
        return nplag.lag2poly(lag)

    def fourier_radial_poly(self):
        """Coefficients in t = |xi|^2 of sum (-1)^n n! K_n L_n(t)."""
        lag = np.array([(-1) ** n * math.factorial(n) * kn for n, kn in enumerate(self.k)])
        return nplag.lag2poly(lag)

    def __call__(self, eta):
        return cwt_mother_eval(self, eta)


def lg_psi1():
    """K = (1/2, 1/2): psi(eta) = (1 - |eta|^2/2) e^{-|eta|^2/2}."""
    return MotherWaveletC((0.5, 0.5))


def lg_psi2():
    """K = (1, 3, 1): psi(eta) = (6 - 7|eta|^2 + |eta|^4) e^{-|eta|^2/2}."""
    return MotherWaveletC((1.0, 3.0, 1.0))


def lg_psi3():
    """K = (1, 1, 3, 1): psi(eta) = (14 - 31|eta|^2 + 12|eta|^4 - |eta|^6) e^{-|eta|^2/2}."""
    return MotherWaveletC((1.0, 1.0, 3.0, 1.0))


def cwt_mother_eval(w, eta):
    """psi(eta) = e^{-|eta|^2/2} sum n! K_n L_n(|eta|^2)."""
    t = np.abs(np.asarray(eta)) ** 2
    total = np.zeros_like(t, dtype=float)
    for n, kn in enumerate(w.k):
        if kn != 0:
            total = total + math.factorial(n) * kn * laguerre(n, t)
    return total * np.exp(-0.5 * t)


def cwt_mother_ft(w, xi):
    """Unitary 2D Fourier transform psi~(xi) = e^{-|xi|^2/2} sum K_n H_{n,n}(|xi|, |xi|)."""
    t = np.abs(np.asarray(xi)) ** 2
    total = np.zeros_like(t, dtype=float)
    for n, kn in enumerate(w.k):
        if kn != 0:
            total = total + (-1) ** n * math.factorial(n) * kn * laguerre(n, t)
    return total * np.exp(-0.5 * t)


def c_psi_prime(w):
    """C'_psi = 4 integral_0^inf |psi~(rho)|^2 / rho d rho (exact moment sum).

    Raises
    ------
    DomainError
        When psi~(0) != 0 (inadmissible: the integral diverges).
    """
    q = w.fourier_radial_poly()
    # |psi~|^2 = e^{-rho^2} Q(rho^2)^2; integral rho^{2j-1} e^{-rho^2} = Gamma(j)/2
    sq = nppoly.polymul(q, q)
    scale = max(1.0, float(np.max(np.abs(sq))))
    if abs(sq[0]) > 1e-12 * scale:
        raise DomainError("wavelet is not admissible: C'_psi diverges at the origin")
    return 4.0 * sum(c * 0.5 * math.gamma(j) for j, c in enumerate(sq) if j > 0)


def c_psi_prime_quad(w):
    """C'_psi by adaptive quadrature (cross-check of :func:`c_psi_prime`)."""
    if not w.admissible:
        raise DomainError("wavelet is not admissible: C'_psi diverges at the origin")
    fn = lambda r: float(cwt_mother_ft(w, r)) ** 2 / r if r > 0 else 0.0
    val, _ = integrate.quad(fn, 0.0, np.inf, epsabs=1e-14, epsrel=1e-13, limit=400)
    return 4.0 * val


def cwt(f, w, mu, kappa):
    """Complex wavelet transform (1/mu) integral d^2eta/pi F(eta) psi*((eta - kappa)/mu)."""
    if not mu > 0:
        raise DomainError("scale mu must be positive")
    eta = f.grid.eta()
    kern = np.conj(cwt_mother_eval(w, (eta - kappa) / mu))
    g = f.grid
    return complex(np.sum(f.values * kern) * g.dx * g.dy / (math.pi * mu))


@dataclass(frozen=True, eq=False)
class CWTMap:
    """CWT coefficients W(mu_i, kappa) with kappa on the grid of the signal."""

    scales: np.ndarray
    grid: fld.Grid2D
    values: np.ndarray


def _fft_axes(g, pad):
    nx, ny = pad * g.nx, pad * g.ny
    kx = 2.0 * math.pi * np.fft.fftfreq(nx, d=g.dx)
    ky = 2.0 * math.pi * np.fft.fftfreq(ny, d=g.dy)
    return nx, ny, kx, ky


def cwt_map(f, w, scales, pad=2):
    """CWT over all shifts kappa of the signal grid, for each scale.

    W(mu, kappa) = (mu/pi) integral d^2k F~(k) psi~(mu k) e^{ik.kappa}, evaluated
    with zero-padded 2D FFTs (F~ the unitary transform).
    """
    g = f.grid
    scales = np.asarray(scales, dtype=float)
    if np.any(scales <= 0):
        raise DomainError("scales must be positive")
    nx, ny, kx, ky = _fft_axes(g, pad)
    spec = np.fft.fft2(np.asarray(f.values), s=(nx, ny))
    kk = np.sqrt(kx[:, None] ** 2 + ky[None, :] ** 2)
    out = np.empty((len(scales), g.nx, g.ny), dtype=complex)
    for i, mu in enumerate(scales):
        filt = cwt_mother_ft(w, mu * kk)
        # sampled kernel spectrum times dx dy equals 2 pi mu^2 psi~(mu k)
        out[i] = 2.0 * mu * np.fft.ifft2(spec * filt)[: g.nx, : g.ny]
    return CWTMap(scales, g, out)


def cwt_energy(m):
    """integral dmu/mu^3 integral d^2kappa/pi |W|^2, trapezoidal in ln(mu)."""
    g = m.grid
    lw = _log_weights(m.scales)
    per = np.sum(np.abs(m.values) ** 2, axis=(1, 2)) * g.dx * g.dy / math.pi
    return float(np.sum(lw * per / m.scales ** 2))


def cwt_inverse(m, w, pad=2):
    """F(eta) = (1/C') integral dmu/mu^3 integral d^2kappa/(pi mu) W(mu, kappa) psi((eta - kappa)/mu)."""
    g = m.grid
    nx, ny, kx, ky = _fft_axes(g, pad)
    kk = np.sqrt(kx[:, None] ** 2 + ky[None, :] ** 2)
    lw = _log_weights(m.scales)
    acc = np.zeros((nx, ny), dtype=complex)
    for i, mu in enumerate(m.scales):
        spec = np.fft.fft2(m.values[i], s=(nx, ny))
        acc += lw[i] * spec * cwt_mother_ft(w, mu * kk) * (2.0 / mu)
    vals = np.fft.ifft2(acc)[: g.nx, : g.ny] / c_psi_prime(w)
    return fld.Field2D(g, vals)


# --------------------------------------------------------------------------
# symplectic wavelet transform


def _mother_values(psi, z):
    if isinstance(psi, MotherWaveletC):
        return cwt_mother_eval(psi, z)
    if isinstance(psi, fld.Field2D):
        return fld.resample_spectral_2d(psi, z.real, z.imag)
    return np.asarray(psi(z))


def swt(f, psi, s, r, kappa):
    """Symplectic wavelet transform.

    integral d^2z/pi F(z) conj( sqrt(s*) psi[s(z - kappa) - r(z* - kappa*)] )

    Parameters
    ----------
    f : Field2D
        Signal on the complex plane z = x + iy.
    psi : MotherWaveletC, Field2D or callable
        Mother wavelet; a sampled Field2D is evaluated by spectral
        resampling, a callable receives a complex array.
    s, r : complex
        |s|^2 - |r|^2 = 1 within 1e-10.
    kappa : complex
    """
    s, r, kappa = complex(s), complex(r), complex(kappa)
    resid = abs(s) ** 2 - abs(r) ** 2 - 1.0
    if abs(resid) > 1e-10:
        raise DomainError(f"|s|^2 - |r|^2 - 1 = {resid:.3e} violates the symplectic invariant")
    z = f.grid.eta()
    arg = s * (z - kappa) - r * np.conj(z - kappa)
    kern = np.conj(cmath.sqrt(s.conjugate()) * _mother_values(psi, arg))
    g = f.grid
    return complex(np.sum(f.values * kern) * g.dx * g.dy / math.pi)


def swt_params(p):
    """(s, r) from an :class:`SRParams` instance."""
    if not isinstance(p, SRParams):
        raise DomainError("expected SRParams")
    return p.s, p.r
