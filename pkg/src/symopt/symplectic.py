"""ABCD ray-transfer matrices, the complex (s, r) parametrization, group
composition, Gaussian-beam q-parameters and matrix decompositions.

Units are dimensionless (hbar = 1, wavenumber absorbed), so the canonical
transform kernel carries no lambda or k prefactors.

Composition order is always ``compose(second, first)``: the returned matrix
is ``second @ first``, i.e. ``first`` acts on the ray before ``second``.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParseError, SingularError

UNIMODULAR_TOL = 1e-10
RENORMALIZE_TOL = 1e-8
Q_DENOMINATOR_EPS = 1e-14


@dataclass(frozen=True)
class RayMatrix:
    """Real unimodular 2x2 matrix [[a, b], [c, d]].

    A determinant within 1e-10 of one is accepted as is.  Drift up to 1e-8
    (typical of long composition chains) is removed by dividing every entry
    by sqrt(det); anything larger raises :class:`DomainError`.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        vals = [float(v) for v in (self.a, self.b, self.c, self.d)]
        if not all(math.isfinite(v) for v in vals):
            raise DomainError("ray matrix entries must be finite")
        det = vals[0] * vals[3] - vals[1] * vals[2]
        if abs(det - 1.0) > UNIMODULAR_TOL:
            if abs(det - 1.0) > RENORMALIZE_TOL or det <= 0:
                raise DomainError(f"ray matrix is not unimodular (det={det!r})")
            s = math.sqrt(det)
            vals = [v / s for v in vals]
        for name, v in zip("abcd", vals):
            object.__setattr__(self, name, v)

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    def as_array(self):
        return np.array([[self.a, self.b], [self.c, self.d]])

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr, dtype=float)
        return cls(arr[0, 0], arr[0, 1], arr[1, 0], arr[1, 1])

    def to_text(self):
        """Serialise as ``ABCD <a> <b> <c> <d>`` with 17 significant digits."""
        return "ABCD " + " ".join(format(v, ".17g") for v in (self.a, self.b, self.c, self.d))

    @classmethod
    def from_text(cls, text):
        parts = text.split()
        if len(parts) != 5 or parts[0] != "ABCD":
            raise ParseError("expected 'ABCD <a> <b> <c> <d>'", line=1)
        try:
            vals = [float(p) for p in parts[1:]]
        except ValueError as exc:
            raise ParseError(f"bad number in ABCD line: {exc}", line=1) from None
        return cls(*vals)


@dataclass(frozen=True)
class SRParams:
    """Complex pair (s, r) with |s|^2 - |r|^2 = 1."""

    s: complex
    r: complex

    def __post_init__(self):
        s, r = complex(self.s), complex(self.r)
        resid = abs(s) ** 2 - abs(r) ** 2 - 1.0
        if abs(resid) > RENORMALIZE_TOL:
            raise DomainError(f"|s|^2-|r|^2-1 = {resid:.3e} violates the invariant")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "r", r)


def identity():
    return RayMatrix(1.0, 0.0, 0.0, 1.0)


def free_space(d):
    """Propagation over a (dimensionless) distance d."""
    return RayMatrix(1.0, d, 0.0, 1.0)


def thin_lens(f):
    """Thin lens of focal length f."""
    if f == 0:
        raise DomainError("focal length must be non-zero")
    return RayMatrix(1.0, 0.0, -1.0 / f, 1.0)


def rotation(theta):
    """Fractional-Fourier type rotation [[cos, sin], [-sin, cos]]."""
    c, s = math.cos(theta), math.sin(theta)
    return RayMatrix(c, s, -s, c)


def fourier():
    return RayMatrix(0.0, 1.0, -1.0, 0.0)


def scaling(m):
    if m == 0:
        raise DomainError("scale factor must be non-zero")
    return RayMatrix(m, 0.0, 0.0, 1.0 / m)


def compose(second, first):
    """Matrix product ``second @ first`` (``first`` acts first)."""
    return RayMatrix(
        second.a * first.a + second.b * first.c,
        second.a * first.b + second.b * first.d,
        second.c * first.a + second.d * first.c,
        second.c * first.b + second.d * first.d,
    )


def compose_chain(*matrices):
    """Compose matrices listed in the order the light meets them."""
    out = identity()
    for m in matrices:
        out = compose(m, out)
    return out


def matrix_inverse(m):
    """Inverse [[d, -b], [-c, a]] of a unimodular matrix."""
    return RayMatrix(m.d, -m.b, -m.c, m.a)


def to_sr(m):
    """Map [[A, B], [C, D]] to (s, r).

    s = (A + D - i(B - C)) / 2,  r = -(A - D + i(B + C)) / 2.
    """
    s = 0.5 * complex(m.a + m.d, -(m.b - m.c))
    r = -0.5 * complex(m.a - m.d, m.b + m.c)
    return SRParams(s, r)


def from_sr(p):
    """Inverse of :func:`to_sr`."""
    s, r = p.s, p.r
    return RayMatrix(s.real - r.real, -s.imag - r.imag, s.imag - r.imag, s.real + r.real)


def sr_compose(p, p2):
    """Group product in (s, r) form.

    s'' = s s' + r conj(r'),  r'' = r' s + r conj(s').  With ``p = to_sr(M)``
    and ``p2 = to_sr(M')`` the result is ``to_sr(M @ M')``.
    """
    s, r, s2, r2 = p.s, p.r, p2.s, p2.r
    return SRParams(s * s2 + r * r2.conjugate(), r2 * s + r * s2.conjugate())


def q_forward(m, q1):
    """Gaussian-beam law q2 = (A q1 + B) / (C q1 + D).

    The beam field is exp(i x^2 / (2 q)) so that free space adds d to q;
    the vacuum exp(-x^2/2) then has q = -i.
    """
    q1 = complex(q1)
    den = m.c * q1 + m.d
    if abs(den) < Q_DENOMINATOR_EPS:
        raise SingularError("C q + D vanishes: beam focused to a point")
    return (m.a * q1 + m.b) / den


def q_of_matrix(m):
    """Beam parameter -(A + iB) / (C + iD) of the squeezed vacuum made by m.

    The value is quoted for the field written as exp(-i x^2 / (2 q)), so the
    unsqueezed vacuum (identity matrix) has q = i.  In the convention of
    :func:`q_forward` the same beam has parameter -q, hence
    q_forward(M', -q_of_matrix(M)) = -q_of_matrix(M' M).
    """
    den = complex(m.c, m.d)
    if abs(den) < Q_DENOMINATOR_EPS:
        raise SingularError("C + iD vanishes")
    return -complex(m.a, m.b) / den


def decompose_chirp_scale_chirp(m, eps=1e-12):
    """Factor m = [1,0;C/A,1] [A,0;0,1/A] [1,B/A;0,1].

    Returns
    -------
    (c_over_a, scale, b_over_a)

    Raises
    ------
    DomainError
        When |A| <= eps; use :func:`decompose_via_b` or
        :func:`decompose_via_c` (or :func:`decompose`) instead.
    """
    if abs(m.a) <= eps:
        raise DomainError("A is zero: chirp-scale-chirp factorisation unavailable")
    return (m.c / m.a, m.a, m.b / m.a)


def decompose_via_b(m, eps=1e-12):
    """Factors (left to right) for B != 0.

    m = [1,0;D/B,1] [B,0;0,1/B] [0,1;-1,0] [1,0;A/B,1]
    """
    if abs(m.b) <= eps:
        raise DomainError("B is zero")
    b = m.b
    return [RayMatrix(1.0, 0.0, m.d / b, 1.0), RayMatrix(b, 0.0, 0.0, 1.0 / b),
            fourier(), RayMatrix(1.0, 0.0, m.a / b, 1.0)]


def decompose_via_c(m, eps=1e-12):
    """Factors (left to right) for C != 0.

    m = [1,A/C;0,1] [-1/C,0;0,-C] [0,1;-1,0] [1,D/C;0,1]
    """
    if abs(m.c) <= eps:
        raise DomainError("C is zero")
    c = m.c
    return [RayMatrix(1.0, m.a / c, 0.0, 1.0), RayMatrix(-1.0 / c, 0.0, 0.0, -c),
            fourier(), RayMatrix(1.0, m.d / c, 0.0, 1.0)]


def decompose(m, eps=1e-12):
    """Return elementary factors (left to right) whose product is m.

    Tries the chirp-scale-chirp form, then the B form, then the C form.
    """
    if abs(m.a) > eps:
        ca, sc, ba = decompose_chirp_scale_chirp(m, eps)
        return [RayMatrix(1.0, 0.0, ca, 1.0), RayMatrix(sc, 0.0, 0.0, 1.0 / sc),
                RayMatrix(1.0, ba, 0.0, 1.0)]
    if abs(m.b) > eps:
        return decompose_via_b(m, eps)
    return decompose_via_c(m, eps)


def product(factors):
    """Multiply factors written left to right."""
    out = identity()
    for f in reversed(factors):
        out = compose(f, out)
    return out


def decompose_frft_form(m, fe=1.0):
    """Factor m = [1,0;-P,1] [ms,0;0,1/ms] [cos phi, fe sin phi; -sin phi/fe, cos phi].

    Parameters
    ----------
    m : RayMatrix
    fe : float
        Positive standard focal length of the rotation factor.

    Returns
    -------
    (P, mscale, phi)
        ``mscale > 0`` and ``phi`` in (-pi, pi].
    """
    if fe <= 0:
        raise DomainError("fe must be positive")
    ms2 = m.a ** 2 + (m.b / fe) ** 2
    mscale = math.sqrt(ms2)
    phi = math.atan2(m.b / fe, m.a)
    p = -(m.a * m.c + m.d * m.b / fe ** 2) / ms2
    return p, mscale, phi


def frft_form_factors(p, mscale, phi, fe=1.0):
    """Rebuild the three factors returned by :func:`decompose_frft_form`."""
    c, s = math.cos(phi), math.sin(phi)
    return [RayMatrix(1.0, 0.0, -p, 1.0), RayMatrix(mscale, 0.0, 0.0, 1.0 / mscale),
            RayMatrix(c, fe * s, -s / fe, c)]


def thick_lens_matrix(n, l, r1, r2):
    """Thick lens of index n, thickness l and surface radii r1, r2.

    A = 1 - (1 - 1/n) l / r1,  B = l / n,  D = 1 - (1 - 1/n) l / r2,
    C = -[(n-1)(r1+r2)/(r1 r2) - l (n-1)^2 / (n r1 r2)].
    """
    if n <= 1:
        raise DomainError("refractive index must exceed 1")
    if l <= 0:
        raise DomainError("thickness must be positive")
    if r1 == 0 or r2 == 0:
        raise DomainError("curvature radii must be non-zero")
    a = 1.0 - (1.0 - 1.0 / n) * l / r1
    b = l / n
    d = 1.0 - (1.0 - 1.0 / n) * l / r2
    c = -((n - 1.0) * (r1 + r2) / (r1 * r2) - l * (n - 1.0) ** 2 / (n * r1 * r2))
    return RayMatrix(a, b, c, d)


def random_unimodular(rng, scale=1.0, min_b=0.0, max_tries=1000):
    """Draw a well-conditioned random unimodular matrix.

    Built as shear * dilation * rotation so that every entry stays O(1).
    With ``min_b > 0`` draws are rejected until |B| >= min_b, which keeps
    the Fresnel kernel away from its delta-function limit.
    """
    for _ in range(max_tries):
        theta = rng.uniform(-math.pi, math.pi)
        ms = math.exp(rng.uniform(-0.4, 0.4) * scale)
        p = rng.uniform(-0.6, 0.6) * scale
        m = product(frft_form_factors(p, ms, theta))
        if abs(m.b) >= min_b:
            return m
    raise DomainError(f"no draw with |B| >= {min_b} in {max_tries} tries")

