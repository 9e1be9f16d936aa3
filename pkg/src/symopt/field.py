"""Uniformly sampled complex fields in one and two dimensions, grid algebra,
inner products, band-limited resampling and the text file formats.

File formats (ASCII, LF terminated, single-space separated, floats written
with 17 significant digits so that a write/read cycle is bit exact)::

    CFLD1 <n> <x0> <dx>                       then n lines  <re> <im>
    CFLD2 <nx> <ny> <x0> <y0> <dx> <dy>       then nx*ny lines, x index slow
    TOMO <n> <ndir> <x0> <dx>                 then per direction a line
                                              DIR <D> <B> and n lines <value>
"""
import io
import math
import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy import ndimage

from .errors import DomainError, EdgeDecayWarning, ParseError, ShapeError

DEFAULT_N = 256
DEFAULT_X0 = -12.8
DEFAULT_DX = 0.1
EDGE_DECAY_TOL = 1e-10


def _fmt(v):
    return format(float(v), ".17g")


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid x_k = x0 + k dx, k = 0..n-1."""

    n: int
    x0: float
    dx: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError("a grid needs at least two samples")
        if not (self.dx > 0 and math.isfinite(self.dx)):
            raise DomainError("grid spacing must be positive")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "dx", float(self.dx))

    @property
    def x(self):
        return self.x0 + self.dx * np.arange(self.n)

    @property
    def extent(self):
        return self.x0, self.x0 + self.dx * (self.n - 1)

    @classmethod
    def centered(cls, n, dx):
        """Grid of n points with spacing dx whose middle sample is x = 0."""
        return cls(n, -dx * (n // 2), dx)

    @classmethod
    def radial(cls, n, dr):
        """Radial grid starting at r = 0."""
        return cls(n, 0.0, dr)

    def same_as(self, other, rtol=1e-12):
        return (self.n == other.n
                and abs(self.x0 - other.x0) <= rtol * max(1.0, abs(self.x0))
                and abs(self.dx - other.dx) <= rtol * self.dx)


def default_grid():
    """Desk-scale grid: n = 256, x in [-12.8, 12.8), dx = 0.1."""
    return Grid1D(DEFAULT_N, DEFAULT_X0, DEFAULT_DX)


@dataclass(frozen=True)
class Grid2D:
    """Product grid; arrays over it have shape (nx, ny) (x index slow)."""

    nx: int
    ny: int
    x0: float
    y0: float
    dx: float
    dy: float

    def __post_init__(self):
        Grid1D(self.nx, self.x0, self.dx)
        Grid1D(self.ny, self.y0, self.dy)
        for name, cast in (("nx", int), ("ny", int), ("x0", float), ("y0", float),
                           ("dx", float), ("dy", float)):
            object.__setattr__(self, name, cast(getattr(self, name)))

    @classmethod
    def from_axes(cls, gx, gy=None):
        gy = gx if gy is None else gy
        return cls(gx.n, gy.n, gx.x0, gy.x0, gx.dx, gy.dx)

    @classmethod
    def centered(cls, n, dx):
        g = Grid1D.centered(n, dx)
        return cls.from_axes(g)

    @property
    def xaxis(self):
        return Grid1D(self.nx, self.x0, self.dx)

    @property
    def yaxis(self):
        return Grid1D(self.ny, self.y0, self.dy)

    @property
    def x(self):
        return self.xaxis.x

    @property
    def y(self):
        return self.yaxis.x

    def mesh(self):
        """Return (X, Y) coordinate arrays of shape (nx, ny)."""
        return np.meshgrid(self.x, self.y, indexing="ij")

    def eta(self):
        """Complex coordinate eta = x + i y on the grid."""
        xx, yy = self.mesh()
        return xx + 1j * yy

    def same_as(self, other):
        return self.xaxis.same_as(other.xaxis) and self.yaxis.same_as(other.yaxis)


def _frozen(arr, dtype=complex):
    arr = np.array(arr, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Field1D:
    """Complex samples on a :class:`Grid1D`.

    ``meta`` carries diagnostic flags (for example ``edge_decay``) produced
    by the transform that created the field.
    """

    grid: Grid1D
    values: np.ndarray
    meta: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        vals = _frozen(self.values)
        if vals.shape != (self.grid.n,):
            raise ShapeError(f"expected {self.grid.n} samples, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise DomainError("field values must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def x(self):
        return self.grid.x

    def norm(self):
        return math.sqrt(float(np.sum(np.abs(self.values) ** 2)) * self.grid.dx)

    def with_values(self, values, **meta):
        return Field1D(self.grid, values, dict(meta))


@dataclass(frozen=True, eq=False)
class Field2D:
    """Complex samples on a :class:`Grid2D`, array shape (nx, ny)."""

    grid: Grid2D
    values: np.ndarray
    meta: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        vals = _frozen(self.values)
        if vals.shape != (self.grid.nx, self.grid.ny):
            raise ShapeError(f"expected shape {(self.grid.nx, self.grid.ny)}, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise DomainError("field values must be finite")
        object.__setattr__(self, "values", vals)

    def norm(self):
        g = self.grid
        return math.sqrt(float(np.sum(np.abs(self.values) ** 2)) * g.dx * g.dy)

    def with_values(self, values, **meta):
        return Field2D(self.grid, values, dict(meta))


@dataclass(frozen=True, eq=False)
class Tomogram:
    """Quadrature distributions: ``values[j]`` is the projection along
    direction ``directions[j] = (D, B)`` sampled on ``xgrid``."""

    xgrid: Grid1D
    directions: tuple
    values: np.ndarray

    def __post_init__(self):
        dirs = tuple((float(d), float(b)) for d, b in self.directions)
        vals = _frozen(self.values, dtype=float)
        if vals.shape != (len(dirs), self.xgrid.n):
            raise ShapeError(f"expected shape {(len(dirs), self.xgrid.n)}, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise DomainError("tomogram values must be finite")
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "values", vals)


def inner_product(f, g):
    """Riemann sum  sum_k f_k conj(g_k) dx  over identical grids."""
    if isinstance(f, Field1D):
        if not isinstance(g, Field1D) or not f.grid.same_as(g.grid):
            raise ShapeError("inner product needs identical grids")
        return complex(np.sum(f.values * np.conj(g.values)) * f.grid.dx)
    if not isinstance(g, Field2D) or not f.grid.same_as(g.grid):
        raise ShapeError("inner product needs identical grids")
    return complex(np.sum(f.values * np.conj(g.values)) * f.grid.dx * f.grid.dy)


def sample1d(fn, grid):
    """Evaluate ``fn`` (vectorised over numpy arrays) on every grid point."""
    x = grid.x
    vals = np.asarray(fn(x), dtype=complex)
    if vals.shape == ():
        vals = np.full(grid.n, complex(vals))
    bad = ~np.isfinite(vals)
    if np.any(bad):
        raise DomainError(f"non-finite sample at x = {x[np.argmax(bad)]!r}")
    return Field1D(grid, vals)


def sample2d(fn, grid):
    """Evaluate ``fn(x, y)`` on the (nx, ny) mesh."""
    xx, yy = grid.mesh()
    vals = np.asarray(fn(xx, yy), dtype=complex)
    if vals.shape == ():
        vals = np.full((grid.nx, grid.ny), complex(vals))
    bad = ~np.isfinite(vals)
    if np.any(bad):
        i, j = np.unravel_index(np.argmax(bad), bad.shape)
        raise DomainError(f"non-finite sample at (x, y) = ({xx[i, j]!r}, {yy[i, j]!r})")
    return Field2D(grid, vals)


def edge_level(values, width=2):
    """Largest modulus within ``width`` samples of any edge, relative to the peak."""
    a = np.abs(np.asarray(values))
    peak = a.max()
    if peak == 0:
        return 0.0
    if a.ndim == 1:
        edge = max(a[:width].max(), a[-width:].max())
    else:
        edge = max(a[:width].max(), a[-width:].max(), a[:, :width].max(), a[:, -width:].max())
    return float(edge / peak)


def check_edge_decay(values, tol=EDGE_DECAY_TOL, what="field"):
    """Return True when the field decays at the grid edges, warn otherwise."""
    level = edge_level(values)
    ok = level <= tol
    if not ok:
        warnings.warn(f"{what} does not decay at the grid edges (relative edge level "
                      f"{level:.2e} > {tol:.0e})", EdgeDecayWarning, stacklevel=3)
    return ok


# --------------------------------------------------------------------------
# band-limited resampling


def sinc_matrix(grid, points):
    """Whittaker cardinal-series matrix S with f(points) ~ S @ f(grid.x)."""
    pts = np.asarray(points, dtype=float)
    u = (pts[:, None] - grid.x[None, :]) / grid.dx
    return np.sinc(u)


def resample_spectral_2d(f, xs, ys, upsample=4):
    """Evaluate a decaying sampled 2D field at arbitrary points.

    The field is first refined ``upsample`` times by zero padding its
    discrete spectrum (exact for band-limited data) and the refined samples
    are then interpolated with a quintic spline, whose error on the fine
    grid is O((dx/upsample)^6).  Points outside the grid evaluate to zero.
    """
    g = f.grid
    vals = f.values
    nx, ny = g.nx, g.ny
    if upsample > 1:
        spec = np.fft.fftshift(np.fft.fft2(vals))
        px, py = (upsample - 1) * nx, (upsample - 1) * ny
        spec = np.pad(spec, ((px // 2, px - px // 2), (py // 2, py - py // 2)))
        # odd-even Nyquist bookkeeping: padding centred on the shifted spectrum
        fine = np.fft.ifft2(np.fft.ifftshift(spec)) * upsample * upsample
        # fine sample k corresponds to x0 + k dx / upsample
    else:
        fine = vals
    fx = (np.asarray(xs, dtype=float) - g.x0) / (g.dx / upsample)
    fy = (np.asarray(ys, dtype=float) - g.y0) / (g.dy / upsample)
    coords = np.array([fx.ravel(), fy.ravel()])
    re = ndimage.map_coordinates(fine.real, coords, order=5, mode="constant", cval=0.0)
    im = ndimage.map_coordinates(fine.imag, coords, order=5, mode="constant", cval=0.0)
    return (re + 1j * im).reshape(np.shape(xs))


# --------------------------------------------------------------------------
# text formats


def _open_text(target, mode):
    if isinstance(target, (str, bytes)) or hasattr(target, "__fspath__"):
        return open(target, mode, encoding="ascii", newline="\n"), True
    return target, False


def _parse_floats(parts, lineno, count, what):
    if len(parts) != count:
        raise ParseError(f"expected {count} fields in {what}, found {len(parts)}", lineno)
    out = []
    for p in parts:
        try:
            v = float(p)
        except ValueError:
            raise ParseError(f"not a number: {p!r}", lineno) from None
        if not math.isfinite(v):
            raise ParseError(f"non-finite value {p!r}", lineno)
        out.append(v)
    return out


def _parse_int(token, lineno, what):
    try:
        v = int(token)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {token!r}", lineno) from None
    if v < 1:
        raise ParseError(f"{what} must be positive", lineno)
    return v


def write_field(target, f):
    """Write a Field1D or Field2D in the CFLD1 / CFLD2 text format."""
    fh, close = _open_text(target, "w")
    try:
        if isinstance(f, Field1D):
            g = f.grid
            fh.write(f"CFLD1 {g.n} {_fmt(g.x0)} {_fmt(g.dx)}\n")
            vals = f.values
        else:
            g = f.grid
            fh.write(f"CFLD2 {g.nx} {g.ny} {_fmt(g.x0)} {_fmt(g.y0)} {_fmt(g.dx)} {_fmt(g.dy)}\n")
            vals = f.values.ravel()
        fh.write("".join(f"{_fmt(v.real)} {_fmt(v.imag)}\n" for v in vals))
    finally:
        if close:
            fh.close()


def _read_lines(target):
    fh, close = _open_text(target, "r")
    try:
        text = fh.read()
    finally:
        if close:
            fh.close()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def _read_complex_rows(lines, start, count):
    if len(lines) - start != count:
        raise ParseError(f"expected {count} rows, found {len(lines) - start}", len(lines) + 1)
    out = np.empty(count, dtype=complex)
    for k in range(count):
        lineno = start + k + 1
        re, im = _parse_floats(lines[start + k].split(" "), lineno, 2, "data row")
        out[k] = complex(re, im)
    return out


def read_field(target):
    """Read a CFLD1 or CFLD2 file; errors carry the offending line number."""
    lines = _read_lines(target)
    if not lines:
        raise ParseError("empty file", 1)
    head = lines[0].split(" ")
    if head[0] == "CFLD1":
        if len(head) != 4:
            raise ParseError("CFLD1 header needs 3 fields: n x0 dx", 1)
        n = _parse_int(head[1], 1, "n")
        x0, dx = _parse_floats(head[2:], 1, 2, "header")
        if dx <= 0 or n < 2:
            raise ParseError("grid needs n >= 2 and dx > 0", 1)
        vals = _read_complex_rows(lines, 1, n)
        return Field1D(Grid1D(n, x0, dx), vals)
    if head[0] == "CFLD2":
        if len(head) != 7:
            raise ParseError("CFLD2 header needs 6 fields: nx ny x0 y0 dx dy", 1)
        nx = _parse_int(head[1], 1, "nx")
        ny = _parse_int(head[2], 1, "ny")
        x0, y0, dx, dy = _parse_floats(head[3:], 1, 4, "header")
        if dx <= 0 or dy <= 0 or nx < 2 or ny < 2:
            raise ParseError("grid needs at least 2 samples per axis and positive spacing", 1)
        vals = _read_complex_rows(lines, 1, nx * ny)
        return Field2D(Grid2D(nx, ny, x0, y0, dx, dy), vals.reshape(nx, ny))
    raise ParseError(f"unknown header tag {head[0]!r}", 1)


def write_tomogram(target, t):
    fh, close = _open_text(target, "w")
    try:
        g = t.xgrid
        fh.write(f"TOMO {g.n} {len(t.directions)} {_fmt(g.x0)} {_fmt(g.dx)}\n")
        for (d, b), row in zip(t.directions, t.values):
            fh.write(f"DIR {_fmt(d)} {_fmt(b)}\n")
            fh.write("".join(f"{_fmt(v)}\n" for v in row))
    finally:
        if close:
            fh.close()


def read_tomogram(target):
    lines = _read_lines(target)
    if not lines:
        raise ParseError("empty file", 1)
    head = lines[0].split(" ")
    if head[0] != "TOMO" or len(head) != 5:
        raise ParseError("expected header 'TOMO <n> <ndir> <x0> <dx>'", 1)
    n = _parse_int(head[1], 1, "n")
    ndir = _parse_int(head[2], 1, "ndir")
    x0, dx = _parse_floats(head[3:], 1, 2, "header")
    expected = 1 + ndir * (n + 1)
    if len(lines) != expected:
        raise ParseError(f"expected {expected - 1} rows after the header, found {len(lines) - 1}",
                         len(lines) + 1)
    dirs, rows = [], []
    pos = 1
    for _ in range(ndir):
        parts = lines[pos].split(" ")
        if parts[0] != "DIR":
            raise ParseError("expected 'DIR <D> <B>'", pos + 1)
        dirs.append(tuple(_parse_floats(parts[1:], pos + 1, 2, "DIR line")))
        row = [_parse_floats([lines[pos + 1 + k]], pos + 2 + k, 1, "value row")[0]
               for k in range(n)]
        rows.append(row)
        pos += n + 1
    return Tomogram(Grid1D(n, x0, dx), tuple(dirs), np.array(rows))


def field_to_text(f):
    buf = io.StringIO()
    write_field(buf, f)
    return buf.getvalue()
