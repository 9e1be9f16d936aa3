"""Command-line front end.

Every subcommand reads its inputs from text files (CFLD1/CFLD2 fields,
TOMO tomograms, WTMAP maps), writes its outputs to files and prints a single
JSON line on standard output.  Exit status: 0 on success, 1 on usage or
input-format errors, 2 when a numerical-integrity check fails.
"""
import argparse
import json
import math
import sys
import time
import warnings

import numpy as np

from . import __version__
from . import field as fld
from . import phase_space as ps
from . import symplectic as sym
from . import transforms as tr
from . import wavelets as wv
from .errors import ParseError, SymoptError

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class UsageError(Exception):
    """Raised for bad flag combinations after argparse has accepted them."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _floats(text, count=None, what="value"):
    try:
        vals = [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"could not parse {what} {text!r}") from None
    if count is not None and len(vals) != count:
        raise UsageError(f"{what} needs {count} numbers, got {len(vals)}")
    return vals


def _matrix(text):
    return sym.RayMatrix(*_floats(text, 4, "matrix"))


def _complex(text):
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise UsageError(f"could not parse complex number {text!r}") from None


def _read_1d(path):
    f = fld.read_field(path)
    if not isinstance(f, fld.Field1D):
        raise UsageError(f"{path} holds a 2D field, a 1D field is required")
    return f


def _read_2d(path):
    f = fld.read_field(path)
    if not isinstance(f, fld.Field2D):
        raise UsageError(f"{path} holds a 1D field, a 2D field is required")
    return f


def _require_normalized(f):
    nrm = f.norm()
    if abs(nrm - 1.0) > ps.NORM_TOL:
        raise NormalizationError(f"state is not normalized (norm {nrm:.9f})")


class NormalizationError(SymoptError):
    pass


def _wavelet1d(args):
    if args.g:
        return wv.MotherWavelet1D(tuple(_floats(args.g, what="--g")))
    return {"mexican": wv.mexican_hat, "psi2": wv.hat_psi2, "psi3": wv.hat_psi3}[args.wavelet]()


def _wavelet_c(args):
    if args.k:
        return wv.MotherWaveletC(tuple(_floats(args.k, what="--k")))
    return {"lg1": wv.lg_psi1, "lg2": wv.lg_psi2, "lg3": wv.lg_psi3}[args.wavelet]()


# --------------------------------------------------------------------------
# subcommands; each returns a dict merged into the JSON summary


def cmd_fresnel(args):
    f = _read_1d(args.input)
    g = tr.fresnel_apply(_matrix(args.matrix), f, method=args.method)
    fld.write_field(args.out, g)
    return {"n": f.grid.n, "norm_in": f.norm(), "norm_out": g.norm()}


def cmd_frft(args):
    f = _read_1d(args.input)
    g = tr.frft(args.order, f)
    fld.write_field(args.out, g)
    return {"order": args.order, "norm_in": f.norm(), "norm_out": g.norm()}


def cmd_sfrft(args):
    f = _read_1d(args.input)
    g = tr.scaled_frft(args.order, args.fe, f)
    fld.write_field(args.out, g)
    return {"order": args.order, "fe": args.fe, "norm_out": g.norm()}


def cmd_cfrft(args):
    f = _read_2d(args.input)
    if args.mu is not None or args.nu is not None:
        g = tr.scaled_cfrft(args.order, args.mu or 1.0, args.nu or 1.0, f)
    else:
        g = tr.cfrft(args.order, f)
    fld.write_field(args.out, g)
    return {"order": args.order, "norm_in": f.norm(), "norm_out": g.norm()}


def cmd_collins(args):
    f = _read_2d(args.input)
    m = _matrix(args.matrix)
    summary = {}
    if args.order is None:
        g = tr.collins2d(m, f)
    else:
        g = tr.collins_via_cfrft(m, args.order, f)
        if args.crosscheck:
            ref = tr.collins2d(m, f)
            summary["crosscheck_residual"] = float(np.max(np.abs(g.values - ref.values)))
    fld.write_field(args.out, g)
    summary["norm_out"] = g.norm()
    return summary


def cmd_hankel(args):
    u = _read_1d(args.input)
    g = tr.hankel(args.m, u)
    fld.write_field(args.out, g)
    return {"order": args.m}


def cmd_charmonics(args):
    f = _read_2d(args.input)
    ch = tr.circular_harmonics(f, args.nr, args.mmax)
    with open(args.out, "w", encoding="ascii", newline="\n") as fh:
        fh.write("# m r weight re im\n")
        for m in ch.orders:
            for r, w, v in zip(ch.radii, ch.weights, ch.harmonic(m)):
                fh.write(f"{m} {fld._fmt(r)} {fld._fmt(w)} {fld._fmt(v.real)} {fld._fmt(v.imag)}\n")
    summary = {"nr": args.nr, "mmax": args.mmax}
    if args.alpha is not None:
        c = tr.circular_correlation(ch, args.alpha)
        summary["correlation"] = [c.real, c.imag]
    return summary


def cmd_wigner(args):
    f = _read_1d(args.input)
    w = ps.wigner(f)
    fld.write_field(args.out, w)
    total = float(np.sum(np.real(w.values)) * w.grid.dx * w.grid.dy)
    return {"integral": total, "imag_residue": w.meta.get("imag_residue", 0.0)}


def cmd_tomogram(args):
    if (args.matrix is None) == (args.angles is None):
        raise UsageError("give exactly one of --matrix or --angles")
    f = _read_1d(args.state)
    _require_normalized(f)
    if args.matrix is not None:
        directions = [_matrix(args.matrix)]
    else:
        if args.angles < 1:
            raise UsageError("--angles must be positive")
        directions = ps.rotation_directions(args.angles)
    t = ps.tomogram(f, directions)
    fld.write_tomogram(args.out, t)
    summary = {"directions": len(t.directions)}
    if args.crosscheck:
        w = ps.wigner(f)
        resid = max(float(np.max(np.abs(ps.radon_wigner(w, d, b, t.xgrid) - row)))
                    for (d, b), row in zip(t.directions, t.values))
        summary["crosscheck_residual"] = resid
    return summary


def cmd_invradon(args):
    t = fld.read_tomogram(args.input)
    w = ps.inverse_radon(t)
    fld.write_field(args.out, w)
    g = w.grid
    return {"directions": len(t.directions),
            "integral": float(np.sum(np.real(w.values)) * g.dx * g.dy)}


def cmd_husimi(args):
    f = _read_1d(args.input)
    h = ps.husimi(f, args.kappa)
    fld.write_field(args.out, h)
    g = h.grid
    return {"kappa": args.kappa, "integral": float(np.sum(np.real(h.values)) * g.dx * g.dy)}


def cmd_pqxform(args):
    f = _read_2d(args.input)
    g = ps.pq_inverse(f) if args.inverse else ps.pq_transform(f)
    fld.write_field(args.out, g)
    return {"inverse": bool(args.inverse), "norm_in": f.norm(), "norm_out": g.norm()}


def _angle_grid(n):
    return fld.Grid1D(n, 0.0, math.pi / n)


def cmd_fradon(args):
    if args.inverse:
        proj = _read_2d(args.input)
        thetas = proj.grid.xaxis.x
        lam = proj.grid.yaxis
        n = lam.n
        out = fld.Grid2D.centered(n, lam.dx)
        f = ps.frac_radon_inverse(proj.values, thetas, lam, args.order, out)
        fld.write_field(args.out, f)
        return {"order": args.order, "angles": len(thetas)}
    f = _read_2d(args.input)
    lam = f.grid.xaxis
    ang = _angle_grid(args.angles)
    rows = ps.frac_radon(f, args.order, lam, ang.x)
    # rows are stored on an (angle, lambda) grid
    fld.write_field(args.out, fld.Field2D(fld.Grid2D.from_axes(ang, lam), rows))
    return {"order": args.order, "angles": args.angles}


def cmd_wt(args):
    w = _wavelet1d(args)
    if args.inverse:
        m = wv.read_wtmap(args.input)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", RuntimeWarning)
            f = wv.wt_inverse(m, w)
        fld.write_field(args.out, f)
        return {"scales": len(m.scales), "warnings": [str(c.message) for c in caught]}
    f = _read_1d(args.input)
    scales = wv.log_scales(args.mu_min, args.mu_max, args.nmu)
    m = wv.wt_map(f, w, scales, method=args.method)
    wv.write_wtmap(args.out, m)
    energy = wv.wt_energy(m, w)
    return {"scales": args.nmu, "c_psi": wv.c_psi(w),
            "parseval_ratio": energy / (2.0 * wv.c_psi(w) * f.norm() ** 2)}


def cmd_cwt(args):
    w = _wavelet_c(args)
    f = _read_2d(args.input)
    summary = {"c_psi_prime": wv.c_psi_prime(w)}
    if args.kappa is not None:
        val = wv.cwt(f, w, args.mu, _complex(args.kappa))
        summary["value"] = [val.real, val.imag]
    m = wv.cwt_map(f, w, [args.mu])
    if args.out:
        fld.write_field(args.out, fld.Field2D(f.grid, m.values[0]))
    summary["mu"] = args.mu
    return summary


def cmd_swt(args):
    f = _read_2d(args.input)
    psi = _read_2d(args.mother) if args.mother else _wavelet_c(args)
    val = wv.swt(f, psi, _complex(args.s), _complex(args.r), _complex(args.kappa))
    return {"value": [val.real, val.imag]}


def cmd_abcd(args):
    summary = {}
    if args.compose:
        mats = [_matrix(t) for t in args.compose]
        total = mats[0]
        for m in mats[1:]:
            total = sym.compose(total, m)
        summary["matrix"] = [total.a, total.b, total.c, total.d]
        summary["det"] = total.det
    else:
        if args.matrix is None:
            raise UsageError("give --compose or --matrix")
        total = _matrix(args.matrix)
        summary["matrix"] = [total.a, total.b, total.c, total.d]
        summary["det"] = total.det
    if args.q is not None:
        q = sym.q_forward(total, _complex(args.q))
        summary["q_out"] = [q.real, q.imag]
    if args.sr:
        p = sym.to_sr(total)
        summary["s"] = [p.s.real, p.s.imag]
        summary["r"] = [p.r.real, p.r.imag]
    return summary


def cmd_selftest(args):
    from . import selftest

    def report(res):
        status = "PASS" if res.passed else "FAIL"
        sys.stderr.write(f"{status} {res.name}: residual {res.residual:.3e} "
                         f"(tol {res.tol:.0e}, {res.seconds:.2f} s)\n")

    results = selftest.run_all(report)
    failed = [r.name for r in results if not r.passed]
    summary = {"checks": len(results), "failed": failed}
    if failed:
        raise SelftestFailure(summary)
    return summary


class SelftestFailure(Exception):
    def __init__(self, summary):
        super().__init__("selftest failed")
        self.summary = summary


# --------------------------------------------------------------------------
# parser


def build_parser():
    p = _Parser(prog="symopt", description="Symplectic optics transforms and wavelets.")
    p.add_argument("--version", action="version", version=f"symopt {__version__}")
    sub = p.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    def add(name, fn, help_text, io=True):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=fn)
        if io:
            sp.add_argument("--in", dest="input", required=True, help="input file")
            sp.add_argument("--out", required=True, help="output file")
        return sp

    sp = add("fresnel", cmd_fresnel, "generalized Fresnel transform of a 1D field")
    sp.add_argument("--matrix", required=True, help='"A B C D"')
    sp.add_argument("--method", default="auto", choices=["auto", "direct", "factored", "czt"])

    sp = add("frft", cmd_frft, "fractional Fourier transform")
    sp.add_argument("--order", type=float, required=True, help="angle alpha")

    sp = add("sfrft", cmd_sfrft, "scaled fractional Fourier transform")
    sp.add_argument("--order", type=float, required=True)
    sp.add_argument("--fe", type=float, required=True, help="standard focal length")

    sp = add("cfrft", cmd_cfrft, "complex fractional Fourier transform of a 2D field")
    sp.add_argument("--order", type=float, required=True)
    sp.add_argument("--mu", type=float)
    sp.add_argument("--nu", type=float)

    sp = add("collins", cmd_collins, "complex Collins transform (directly or via CFrFT)")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--order", type=float, help="CFrFT order used for the adaption route")
    sp.add_argument("--crosscheck", action="store_true")

    sp = add("hankel", cmd_hankel, "order-m Hankel transform of radial samples")
    sp.add_argument("--m", type=int, default=0)

    sp = add("charmonics", cmd_charmonics, "circular harmonic decomposition (table output)")
    sp.add_argument("--nr", type=int, default=64)
    sp.add_argument("--mmax", type=int, default=8)
    sp.add_argument("--alpha", type=float, help="also report the circular correlation at alpha")

    add("wigner", cmd_wigner, "Wigner function of a 1D state")

    sp = sub.add_parser("tomogram", help="quadrature tomogram of a 1D state")
    sp.set_defaults(func=cmd_tomogram)
    sp.add_argument("--state", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--matrix")
    sp.add_argument("--angles", type=int)
    sp.add_argument("--crosscheck", action="store_true")

    add("invradon", cmd_invradon, "filtered back-projection of a TOMO file")

    sp = add("husimi", cmd_husimi, "Husimi distribution")
    sp.add_argument("--kappa", type=float, default=1.0)

    sp = add("pqxform", cmd_pqxform, "p-q integration transform of a 2D field")
    sp.add_argument("--inverse", action="store_true")

    sp = add("fradon", cmd_fradon, "fractional Radon transform (or its inverse)")
    sp.add_argument("--order", type=float, required=True)
    sp.add_argument("--angles", type=int, default=128)
    sp.add_argument("--inverse", action="store_true")

    sp = add("wt", cmd_wt, "wavelet transform map (or its inverse)")
    sp.add_argument("--wavelet", default="mexican", choices=["mexican", "psi2", "psi3"])
    sp.add_argument("--g", help="Fock coefficients g_0 ... g_N (overrides --wavelet)")
    sp.add_argument("--mu-min", type=float, default=1e-2)
    sp.add_argument("--mu-max", type=float, default=1e2)
    sp.add_argument("--nmu", type=int, default=96)
    sp.add_argument("--method", default="spectral", choices=["spectral", "direct"])
    sp.add_argument("--inverse", action="store_true")

    sp = sub.add_parser("cwt", help="complex wavelet transform at one scale")
    sp.set_defaults(func=cmd_cwt)
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out")
    sp.add_argument("--wavelet", default="lg1", choices=["lg1", "lg2", "lg3"])
    sp.add_argument("--k", help="coefficients K_0 ... K_N (overrides --wavelet)")
    sp.add_argument("--mu", type=float, default=1.0)
    sp.add_argument("--kappa", help="also report the value at this complex shift")

    sp = sub.add_parser("swt", help="symplectic wavelet transform at one point")
    sp.set_defaults(func=cmd_swt)
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--mother", help="sampled mother wavelet (CFLD2)")
    sp.add_argument("--wavelet", default="lg1", choices=["lg1", "lg2", "lg3"])
    sp.add_argument("--k")
    sp.add_argument("--s", default="1")
    sp.add_argument("--r", default="0")
    sp.add_argument("--kappa", default="0")

    sp = sub.add_parser("abcd", help="ray-matrix algebra")
    sp.set_defaults(func=cmd_abcd)
    sp.add_argument("--compose", nargs="+", metavar="MATRIX",
                    help="matrices multiplied left to right (the last acts first)")
    sp.add_argument("--matrix")
    sp.add_argument("--q", help="propagate this beam parameter")
    sp.add_argument("--sr", action="store_true", help="also print the (s, r) pair")

    sp = sub.add_parser("selftest", help="run the bundled invariant suite")
    sp.set_defaults(func=cmd_selftest)
    return p


def _emit(payload):
    sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")
    sys.stdout.flush()


def run(argv=None):
    """Parse ``argv``, run the subcommand and return the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    t0 = time.perf_counter()
    payload = {"command": args.command}
    status = EXIT_OK
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", fld.EdgeDecayWarning)
            payload.update(args.func(args))
        payload["ok"] = True
    except (UsageError, ParseError, OSError) as exc:
        sys.stderr.write(f"symopt {args.command}: {exc}\n")
        payload.update(ok=False, error=str(exc))
        status = EXIT_USAGE
    except SelftestFailure as exc:
        payload.update(exc.summary)
        payload["ok"] = False
        status = EXIT_NUMERIC
    except SymoptError as exc:
        sys.stderr.write(f"symopt {args.command}: {exc}\n")
        payload.update(ok=False, error=str(exc), error_type=type(exc).__name__)
        status = EXIT_NUMERIC
    payload["seconds"] = round(time.perf_counter() - t0, 6)
    _emit(payload)
    return status


def main():
    sys.exit(run())
