"""Phase-space distributions: the Wigner function, Radon tomography and its
filtered back-projection inverse, Husimi distributions (Gaussian smoothing
and the wavelet route), the p-q integration transform and the fractional
Radon transform.

Conventions
-----------
* W(q, p) = (1/2pi) integral du e^{ipu} f*(q + u/2) f(q - u/2), so the momentum
  marginal is |f^(p)|^2 with f^(p) = (2pi)^{-1/2} integral e^{-ipx} f(x) dx.
* A projection direction (D, B) integrates W along the lines
  x = D q - B p:  P(x) = integral W(q, p) delta(x - D q + B p) dq dp.
* For the back-projection the direction angle is phi = atan2(-B, D), so the
  projection coordinate is x = q cos(phi) + p sin(phi) for unit directions.
"""
import cmath
import math
import warnings

import numpy as np
from scipy import ndimage

from . import field as fld
from .errors import (DomainError, InsufficientDataError, NumericalIntegrityError,
                     RepresentationError)
from .special import hermite_gaussian_all
from .symplectic import RayMatrix, matrix_inverse
from .transforms import fresnel_apply

NORM_TOL = 1e-6
IMAG_DISCARD = 1e-9
IMAG_FAIL = 1e-6
MIN_ANGLES = 8
RECOMMENDED_ANGLES = 32
MIN_FRAC_ANGLES = 64
TAPER_FRACTION = 0.1
UPSAMPLE = 8
PAD_FACTOR = 32
HUSIMI_DEGREE = 24
REPRESENTATION_TOL = 1e-8


def _check_normalized(f, what="state"):
    nrm = f.norm()
    if abs(nrm - 1.0) > NORM_TOL:
        warnings.warn(f"{what} is not normalized (norm {nrm:.9f})", RuntimeWarning, stacklevel=3)
        return False
    return True


def _real_part(values, what):
    """Drop an imaginary residue that should vanish analytically."""
    values = np.asarray(values)
    scale = max(1.0, float(np.max(np.abs(values.real)))) if values.size else 1.0
    resid = float(np.max(np.abs(values.imag))) / scale if values.size else 0.0
    if resid > IMAG_FAIL:
        raise NumericalIntegrityError(f"{what}: imaginary residue {resid:.2e} exceeds {IMAG_FAIL:.0e}")
    return values.real, resid


# --------------------------------------------------------------------------
# Wigner function


def _shifted_samples(values, delta):
    """Band-limited samples f(x0 + (j + delta) dx), j = 0..n-1."""
    if delta == 0.0:
        return np.asarray(values, dtype=complex)
    n = len(values)
    big = 2 * n
    spec = np.fft.fft(np.asarray(values, dtype=complex), big)
    freq = np.fft.fftfreq(big)
    return np.fft.ifft(spec * np.exp(2j * math.pi * freq * delta))[:n]


def wigner(f, qgrid=None, pgrid=None):
    """Wigner function of a sampled wavefunction.

    W(q, p) = (1/2pi) integral du e^{ipu} f*(q + u/2) f(q - u/2)

    The u integral is sampled with step 2 dx, so f is only needed on the
    lattice q + k dx: on the stored samples when q lies on the input grid,
    otherwise after a band-limited (Fourier) shift of the samples.  This
    gives W(q, p) = (dx/pi) sum_k e^{2ipk dx} f*(q + k dx) f(q - k dx).

    Parameters
    ----------
    f : Field1D
        Normalized wavefunction (a warning is issued otherwise).
    qgrid, pgrid : Grid1D, optional
        Output grids, default to the grid of f.

    Returns
    -------
    Field2D
        Real-valued W on the (q, p) mesh; ``meta["imag_residue"]`` records
        the discarded imaginary part.
    """
    _check_normalized(f)
    g = f.grid
    qgrid = g if qgrid is None else qgrid
    pgrid = g if pgrid is None else pgrid
    h = g.dx
    n = g.n
    pos = (qgrid.x - g.x0) / h
    base = np.floor(pos + 1e-9)
    frac = pos - base
    frac[np.abs(frac) < 1e-9] = 0.0
    ks = np.arange(-(n - 1), n)
    kern = np.exp(2j * h * np.outer(ks, pgrid.x))
    out = np.empty((qgrid.n, pgrid.n), dtype=complex)
    for delta in np.unique(frac):
        rows = np.nonzero(frac == delta)[0]
        samples = _shifted_samples(f.values, float(delta))
        i0 = base[rows].astype(int)
        i1 = i0[:, None] + ks[None, :]
        i2 = i0[:, None] - ks[None, :]
        valid = (i1 >= 0) & (i1 < n) & (i2 >= 0) & (i2 < n)
        prod = np.where(valid, np.conj(samples[np.clip(i1, 0, n - 1)])
                        * samples[np.clip(i2, 0, n - 1)], 0.0)
        out[rows] = prod @ kern
    out *= h / math.pi
    vals, resid = _real_part(out, "wigner")
    return fld.Field2D(fld.Grid2D.from_axes(qgrid, pgrid), vals, {"imag_residue": resid})


# --------------------------------------------------------------------------
# Radon projections


def _direction_check(d, b):
    if d == 0 and b == 0:
        raise DomainError("projection direction (D, B) must be non-zero")


def radon_wigner(w, d, b, xgrid=None):
    """Project a phase-space distribution along the direction (D, B).

    P(x) = integral W(q, p) delta(x - D q + B p) dq dp

    Evaluated through the Fourier-slice relation: the one-dimensional
    spectrum of P is the two-dimensional spectrum of W on the line
    (D nu, -B nu), computed by separable quadrature, and P is recovered by
    a Fourier sum over nu up to the sampling limit of the (q, p) grid.

    Parameters
    ----------
    w : Field2D
        Distribution over the (q, p) mesh (real part is used).
    d, b : float
    xgrid : Grid1D, optional
        Output coordinates, defaults to the q axis of ``w``.

    Returns
    -------
    ndarray of float
    """
    _direction_check(d, b)
    g = w.grid
    xgrid = g.xaxis if xgrid is None else xgrid
    return _fourier_slice(np.real(w.values), g, float(d), float(-b), xgrid.x).real


def _fourier_slice(values, g, cx, cy, xs):
    """Line integrals of ``values`` over cx*x + cy*y = xs (Fourier-slice method)."""
    lim = []
    if cx != 0:
        lim.append(math.pi / (abs(cx) * g.dx))
    if cy != 0:
        lim.append(math.pi / (abs(cy) * g.dy))
    numax = min(lim)
    xa, ya = g.x, g.y
    span = (abs(cx) * max(abs(xa[0]), abs(xa[-1])) + abs(cy) * max(abs(ya[0]), abs(ya[-1])))
    span = max(span, float(np.max(np.abs(xs))))
    dnu = 2.0 * math.pi / (4.0 * span)
    nnu = int(math.ceil(numax / dnu))
    nu = dnu * np.arange(-nnu, nnu + 1)
    ex = np.exp(-1j * cx * np.outer(nu, xa))
    ey = np.exp(-1j * cy * np.outer(nu, ya))
    spec = np.sum((ex @ values) * ey, axis=1) * g.dx * g.dy
    back = np.exp(1j * np.outer(xs, nu))
    return (back @ spec) * dnu / (2.0 * math.pi)


def _direction_matrix(d, b):
    # scaled rotation [[D/r^2, B], [-B/r^2, D]]: unimodular with the given D, B
    r2 = d * d + b * b
    return RayMatrix(d / r2, b, -b / r2, d)


def tomogram_direct(f, m, xgrid=None):
    """Quadrature density |(F^{M^{-1}} f)(x)|^2 for the matrix m.

    This is the projection of the Wigner function of f along (D, B), where
    D and B are the entries of m.
    """
    _check_normalized(f)
    xgrid = f.grid if xgrid is None else xgrid
    g = fresnel_apply(matrix_inverse(m), f, xgrid)
    return np.abs(g.values) ** 2


def rotation_directions(nangles):
    """Directions (D, B) = (cos theta, -sin theta), theta = k pi / n."""
    th = math.pi * np.arange(nangles) / nangles
    return [(math.cos(t), -math.sin(t)) for t in th]


def tomogram(f, directions, xgrid=None):
    """Build a :class:`~symopt.field.Tomogram` from ray matrices or (D, B) pairs."""
    xgrid = f.grid if xgrid is None else xgrid
    dirs, rows = [], []
    for item in directions:
        if isinstance(item, RayMatrix):
            m = item
        else:
            d, b = item
            _direction_check(d, b)
            m = _direction_matrix(float(d), float(b))
        dirs.append((m.d, m.b))
        rows.append(tomogram_direct(f, m, xgrid))
    return fld.Tomogram(xgrid, tuple(dirs), np.array(rows))


# --------------------------------------------------------------------------
# filtered back-projection


def _angle_weights(phi):
    """Quadrature weights for angles covering a half turn (period pi)."""
    order = np.argsort(phi)
    srt = phi[order]
    nxt = np.roll(srt, -1)
    nxt[-1] += math.pi
    prv = np.roll(srt, 1)
    prv[0] -= math.pi
    w = np.empty_like(phi)
    w[order] = 0.5 * (nxt - prv)
    return w


def ramp_window(k, knyq, taper=TAPER_FRACTION):
    """|k| band-limited at knyq with a raised-cosine roll-off over the top ``taper``."""
    ak = np.abs(k)
    start = (1.0 - taper) * knyq
    win = np.where(ak <= start, 1.0,
                   0.5 * (1.0 + np.cos(math.pi * np.clip(ak - start, 0, None) / (taper * knyq))))
    win = np.where(ak > knyq, 0.0, win)
    return ak * win


def _filtered_spectra(rows, xgrid, pad=PAD_FACTOR):
    """Ramp-filtered spectra of zero-padded projections.

    Projections are padded symmetrically to ``pad`` times their length so
    that the filtered projection, whose tails decay only like 1/x^2, is
    available well beyond the data window and its periodic images stay
    negligible.  Returns the centred spectra and the coordinate of the first
    padded sample.
    """
    n = xgrid.n
    npad = pad * n
    lead = (npad - n) // 2
    buf = np.zeros((rows.shape[0], npad), dtype=complex)
    buf[:, lead:lead + n] = rows
    k = 2.0 * math.pi * np.fft.fftfreq(npad, d=xgrid.dx)
    filt = ramp_window(k, math.pi / xgrid.dx)
    spec = np.fft.fftshift(np.fft.fft(buf, axis=1) * filt[None, :], axes=1)
    return spec, xgrid.x0 - lead * xgrid.dx


def _refine(spec, upsample=UPSAMPLE):
    """Band-limited refinement of one centred spectrum by ``upsample``."""
    extra = (upsample - 1) * len(spec)
    big = np.pad(spec, (extra // 2, extra - extra // 2))
    return np.fft.ifft(np.fft.ifftshift(big)) * upsample


def _back_project(rows, phi, xgrid, out, complex_out=False):
    rows = np.asarray(rows)
    weights = _angle_weights(phi)
    spec, fx0 = _filtered_spectra(rows, xgrid)
    fdx = xgrid.dx / UPSAMPLE
    qq, pp = out.mesh()
    acc = np.zeros(qq.shape, dtype=complex if complex_out else float)
    for j in range(len(phi)):
        fine = _refine(spec[j])
        x = qq * math.cos(phi[j]) + pp * math.sin(phi[j])
        coord = ((x - fx0) / fdx).ravel()[None, :]
        val = ndimage.map_coordinates(fine.real, coord, order=3, mode="constant", cval=0.0)
        if complex_out:
            im = ndimage.map_coordinates(fine.imag, coord, order=3, mode="constant", cval=0.0)
            val = val + 1j * im
        acc += weights[j] * val.reshape(qq.shape)
    return acc / (2.0 * math.pi)


def _fold_angles(phi, rows):
    """Map angles to [0, pi), reflecting projections whose angle is flipped."""
    phi = np.asarray(phi, dtype=float)
    rows = np.array(rows)
    folded = np.mod(phi, 2.0 * math.pi)
    flip = folded >= math.pi - 1e-12
    folded[flip] -= math.pi
    return folded, rows, flip


def _reflect_row(row, xgrid):
    # P(-x) on the same grid, band-limited
    return fld.sinc_matrix(xgrid, -xgrid.x) @ row


def inverse_radon(t, out=None):
    """Filtered back-projection of a tomogram.

    W(q, p) = (1/4pi^2) integral_0^pi dphi integral dk |k| P^_phi(k) e^{ik(q cos phi + p sin phi)}

    The ramp |k| is cut at the grid Nyquist frequency with a raised-cosine
    roll-off over its top 10%; each filtered projection is refined eight
    times spectrally and then interpolated with a cubic spline.

    Parameters
    ----------
    t : Tomogram
        Unit directions (D^2 + B^2 = 1) covering a half turn.
    out : Grid2D, optional
        Reconstruction mesh, defaults to xgrid x xgrid.

    Raises
    ------
    InsufficientDataError
        With fewer than 8 directions.
    DomainError
        When a direction is not normalized.
    """
    nd = len(t.directions)
    if nd < MIN_ANGLES:
        raise InsufficientDataError(f"inverse Radon needs at least {MIN_ANGLES} directions, got {nd}")
    if nd < RECOMMENDED_ANGLES:
        warnings.warn(f"only {nd} directions; at least {RECOMMENDED_ANGLES} are recommended",
                      RuntimeWarning, stacklevel=2)
    dirs = np.array(t.directions, dtype=float)
    norms = np.hypot(dirs[:, 0], dirs[:, 1])
    if np.any(np.abs(norms - 1.0) > 1e-9):
        raise DomainError("inverse_radon needs unit directions (D^2 + B^2 = 1)")
    phi = np.arctan2(-dirs[:, 1], dirs[:, 0])
    phi, rows, flip = _fold_angles(phi, t.values)
    for j in np.nonzero(flip)[0]:
        rows[j] = _reflect_row(rows[j], t.xgrid)
    out = fld.Grid2D.from_axes(t.xgrid) if out is None else out
    vals = _back_project(rows, phi, t.xgrid, out)
    return fld.Field2D(out, vals)


# --------------------------------------------------------------------------
# Husimi distributions


def husimi(f, kappa, qgrid=None, pgrid=None):
    """Husimi distribution as a Gaussian smoothing of the Wigner function.

    F_h(q, p, kappa) = integral W(q', p') exp[-kappa (q'-q)^2 - (p'-p)^2 / kappa] dq' dp'

    W is computed on the grid of f in both variables and the smoothing is
    applied as two Gaussian matrix products.
    """
    if not kappa > 0:
        raise DomainError("kappa must be positive")
    qgrid = f.grid if qgrid is None else qgrid
    pgrid = f.grid if pgrid is None else pgrid
    w = wigner(f)
    g = w.grid
    gq = np.exp(-kappa * (qgrid.x[:, None] - g.x[None, :]) ** 2)
    gp = np.exp(-((pgrid.x[:, None] - g.y[None, :]) ** 2) / kappa)
    vals = gq @ np.real(w.values) @ gp.T * g.dx * g.dy
    return fld.Field2D(fld.Grid2D.from_axes(qgrid, pgrid), vals)


def hermite_coefficients(f, degree=HUSIMI_DEGREE):
    """c_n = <psi_n | f> for n <= degree and the relative expansion residual."""
    x = f.grid.x
    basis = hermite_gaussian_all(degree, x)
    coeffs = basis @ np.asarray(f.values) * f.grid.dx
    recon = coeffs @ basis
    nrm = max(f.norm(), 1e-300)
    resid = math.sqrt(float(np.sum(np.abs(recon - f.values) ** 2)) * f.grid.dx) / nrm
    return coeffs, resid


def husimi_via_wt(f, kappa, q, p, degree=HUSIMI_DEGREE, coeffs=None):
    """Husimi value at (q, p) as a wavelet transform of the Gaussian.

    F_h = (1/2) (e^{-p^2/kappa} / sqrt(pi kappa)) |integral f*((x - s)/mu) e^{-x^2/2} dx|^2

    with mu = sqrt(kappa) and the complex shift s = -(kappa q + i p)/sqrt(kappa).
    f* at complex arguments is the analytic continuation of conj(f) through
    its Hermite-Gaussian expansion, sum conj(c_n) psi_n(z).  The factor 1/2
    makes the value coincide with :func:`husimi`.

    Raises
    ------
    RepresentationError
        When the expansion to ``degree`` leaves a relative residual above 1e-8.
    """
    if not kappa > 0:
        raise DomainError("kappa must be positive")
    if coeffs is None:
        coeffs, resid = hermite_coefficients(f, degree)
        if resid > REPRESENTATION_TOL:
            raise RepresentationError(
                f"Hermite-Gaussian expansion to degree {degree} leaves residual {resid:.2e}")
    mu = math.sqrt(kappa)
    s = -(kappa * q + 1j * p) / mu
    half = abs(s.real) + 12.0 * max(1.0, mu)
    x = np.arange(-half, half + 1e-12, 0.02)
    z = (x - s) / mu
    fbar = np.conj(coeffs) @ hermite_gaussian_all(len(coeffs) - 1, z)
    integral = np.sum(fbar * np.exp(-0.5 * x * x)) * 0.02
    return 0.5 * math.exp(-p * p / kappa) / math.sqrt(math.pi * kappa) * abs(integral) ** 2


# --------------------------------------------------------------------------
# p-q integration transform


def _pq_apply(values, gin, xs, ys, sign):
    # sum_{a,b} e^{2i sign (a - x)(b - y)} values[a, b] da db / pi
    a, b = gin.x, gin.y
    g = np.exp(2j * sign * np.outer(a, b)) * values
    fa = np.exp(-2j * sign * np.outer(ys, a))   # [y, a]
    eb = np.exp(-2j * sign * np.outer(xs, b))   # [x, b]
    t = fa @ g                                  # [y, b]
    res = eb @ t.T                              # [x, y]
    return np.exp(2j * sign * np.outer(xs, ys)) * res * gin.dx * gin.dy / math.pi


def pq_transform(h, out=None):
    """p-q integration transform on a grid.

    f(x, y) = integral dp dq / pi  e^{2i(p - x)(q - y)} h(p, q)

    ``h`` is sampled on a (p, q) mesh; the result lives on ``out`` (an
    (x, y) mesh, default the input mesh).  The oscillatory integral is
    truncated to the data window.
    """
    out = h.grid if out is None else out
    meta = {"edge_decay": fld.check_edge_decay(h.values)}
    return fld.Field2D(out, _pq_apply(h.values, h.grid, out.x, out.y, 1.0), meta)


def pq_inverse(f, out=None):
    """Inverse p-q transform h(p, q) = integral dx dy / pi e^{-2i(p - x)(q - y)} f(x, y)."""
    out = f.grid if out is None else out
    meta = {"edge_decay": fld.check_edge_decay(f.values)}
    return fld.Field2D(out, _pq_apply(f.values, f.grid, out.x, out.y, -1.0), meta)


def pq_transform_at(h, x, y):
    """Value of :func:`pq_transform` at a single point (x, y)."""
    return complex(_pq_apply(h.values, h.grid, np.array([x]), np.array([y]), 1.0)[0, 0])


def pq_inverse_at(f, p, q):
    """Value of :func:`pq_inverse` at a single point (p, q)."""
    return complex(_pq_apply(f.values, f.grid, np.array([p]), np.array([q]), -1.0)[0, 0])


def chirplet_kernel(alpha, x, y):
    """(i e^{-i alpha} sin alpha)^{-1/2} exp{i(x^2+y^2)/(2 tan alpha) - i x y / sin alpha} e^{i x y}."""
    s, t = math.sin(alpha), math.tan(alpha)
    pref = 1.0 / cmath.sqrt(1j * cmath.exp(-1j * alpha) * s)
    return pref * np.exp(1j * (x * x + y * y) / (2.0 * t) - 1j * x * y / s + 1j * x * y)


def chirplet_to_frft_check(alpha, n=256, dx=0.1, probes=None):
    """Compare the p-q transform of a Gaussian chirplet with the FrFT kernel.

    The chirplet exp[i (p^2 + q^2) tan(pi/4 - alpha/2)] is sampled on an
    n x n window of spacing dx, transformed, and multiplied by
    2 / (i e^{-i alpha} + 1); the result is compared with
    :func:`chirplet_kernel` at the probe points.

    Returns
    -------
    float
        Largest absolute residual over the probes (default a 5 x 5 lattice
        on [-1, 1]^2).
    """
    if not 0.2 < alpha < math.pi - 0.2:
        raise DomainError("alpha must lie in (0.2, pi - 0.2)")
    g = fld.Grid2D.centered(n, dx)
    pp, qq = g.mesh()
    tau = math.tan(0.25 * math.pi - 0.5 * alpha)
    h = np.exp(1j * (pp * pp + qq * qq) * tau)
    if probes is None:
        axis = np.linspace(-1.0, 1.0, 5)
    else:
        axis = np.asarray(probes, dtype=float)
    lhs = 2.0 / (1j * cmath.exp(-1j * alpha) + 1.0) * _pq_apply(h, g, axis, axis, 1.0)
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    rhs = chirplet_kernel(alpha, xx, yy)
    return float(np.max(np.abs(lhs - rhs)))


# --------------------------------------------------------------------------
# fractional Radon transform


def _check_order(alpha):
    s = math.sin(alpha)
    if abs(s) < 1e-8:
        raise DomainError("fractional Radon order is undefined at sin(alpha) = 0")
    return math.cos(alpha) / s


def frac_radon(f, alpha, lam_grid, theta):
    """Fractional Radon transform.

    R_alpha(lambda, theta) = integral d^2r f(r) e^{i(|r|^2 - lambda^2)/(2 tan alpha)}
                             delta(lambda - e.r),  e = (cos theta, sin theta)

    Line integrals are evaluated with the Fourier-slice relation.

    Parameters
    ----------
    f : Field2D
    alpha : float
    lam_grid : Grid1D
    theta : float or array_like
        Projection angle(s).

    Returns
    -------
    ndarray of complex
        Shape (len(lam_grid.x),) for scalar theta, else (ntheta, n).
    """
    cot = _check_order(alpha)
    g = f.grid
    xx, yy = g.mesh()
    weighted = np.asarray(f.values) * np.exp(0.5j * cot * (xx * xx + yy * yy))
    lam = lam_grid.x
    post = np.exp(-0.5j * cot * lam * lam)
    thetas = np.atleast_1d(np.asarray(theta, dtype=float))
    rows = np.array([post * _fourier_slice(weighted, g, math.cos(t), math.sin(t), lam)
                     for t in thetas])
    return rows[0] if np.ndim(theta) == 0 else rows


def frac_radon_inverse(proj, thetas, lam_grid, alpha, out):
    """Invert :func:`frac_radon` from projections over a half turn.

    The order-alpha phase is removed from each projection, the resulting
    Radon data are inverted by filtered back-projection, and the chirp
    e^{-i|r|^2/(2 tan alpha)} is applied to the result.  In terms of the
    fractional projections the prefactor is 1/(4 pi^2 sin^2 alpha) times the
    |k| sin^2 alpha weight of the order-alpha ramp.

    Raises
    ------
    InsufficientDataError
        With fewer than 64 angles.
    """
    cot = _check_order(alpha)
    proj = np.atleast_2d(np.asarray(proj, dtype=complex))
    thetas = np.asarray(thetas, dtype=float)
    if len(thetas) < MIN_FRAC_ANGLES:
        raise InsufficientDataError(
            f"fractional Radon inversion needs at least {MIN_FRAC_ANGLES} angles, got {len(thetas)}")
    if proj.shape != (len(thetas), lam_grid.n):
        raise DomainError(f"projections must have shape {(len(thetas), lam_grid.n)}")
    lam = lam_grid.x
    radon = proj * np.exp(0.5j * cot * lam * lam)[None, :]
    phi, rows, flip = _fold_angles(thetas, radon)
    for j in np.nonzero(flip)[0]:
        rows[j] = _reflect_row(rows[j], lam_grid)
    g = _back_project(rows, phi, lam_grid, out, complex_out=True)
    xx, yy = out.mesh()
    return fld.Field2D(out, g * np.exp(-0.5j * cot * (xx * xx + yy * yy)))
