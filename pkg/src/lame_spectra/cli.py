"""Command-line front end.

Every command writes one JSON document (or CSV with ``#`` parameter lines)
that starts by echoing its numeric inputs. Parse errors exit with status 2
and domain errors with status 3, each printing a one-line JSON error object
on stderr.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import __version__
from .bh_symbol import DEFAULT_SIGMA, BHParams, bh_table_check, green_bh, ssf_bh, symbol_coefficients
from .elliptic import EllipticParams, invariants_from_roots
from .elliptic import sigma as wsigma
from .elliptic import wp, wp_inverse, wp_prime, zeta
from .errors import DomainError
from .euler_top import build_euler_top, charpoly, spectral_poly_diagnostic
from .krein import (
    OperatorPair,
    counting_ssf,
    random_pair,
    ssf_l1_bound_check,
    ssf_steps,
    ssf_via_arg,
    trace_formula_check,
)
from .lame_green import LameSolutionParams, green_kernel, lame_residual, lame_solution, lame_ssf
from .polynomial import band_edges

DEFAULT_SEED = 20240101


class ParseError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def parse_complex(text: str) -> complex:
    """'1.5', '1+2j', '1+2i' or '[re, im]'."""
    t = text.strip()
    try:
        if t.startswith("["):
            re_, im_ = json.loads(t)
            return complex(float(re_), float(im_))
        return complex(t.replace(" ", "").replace("i", "j"))
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def parse_grid(text: str) -> np.ndarray:
    """'start:stop:step', stop included when it falls on the lattice."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid must be start:stop:step, got {text!r}")
    try:
        a, b, h = (float(x) for x in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from exc
    if h <= 0 or b < a or not all(map(math.isfinite, (a, b, h))):
        raise argparse.ArgumentTypeError(f"grid needs step > 0 and stop >= start: {text!r}")
    n = int(math.floor((b - a) / h + 1e-9)) + 1
    return a + h * np.arange(n)


def parse_spin(text: str) -> Fraction:
    try:
        return Fraction(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad spin {text!r}") from exc


def parse_sigma(text: str) -> tuple[int, int, int]:
    try:
        vals = tuple(int(x) for x in text.replace("[", "").replace("]", "").split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad sigma {text!r}") from exc
    if len(vals) != 3:
        raise argparse.ArgumentTypeError("sigma needs three integers")
    return vals


def _encode(obj: Any):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return [_encode(x) for x in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _jsonable(obj: Any):
    """Recursively turn complex values into [re, im] pairs."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        c = complex(obj)
        return [c.real, c.imag]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def dump_json(doc: dict) -> str:
    return json.dumps(_jsonable(doc), default=_encode, indent=2) + "\n"


def _elliptic_from_args(args) -> EllipticParams:
    if getattr(args, "roots", None):
        return EllipticParams.from_roots(*args.roots)
    return EllipticParams.from_invariants(args.g2, args.g3)


def _g2_warning(ell: EllipticParams) -> list[str]:
    # 4(e1e2+e2e3+e1e3) and its negative are both in circulation as "g2"
    inv = invariants_from_roots(*ell.roots)
    if abs(inv.g2_paper - inv.g2_vieta) > 1e-12 * max(1.0, abs(ell.g2)):
        msg = (
            f"g2 from the roots: 4(e1e2+e2e3+e1e3) = {inv.g2_paper:.12g}, "
            f"-4(e1e2+e2e3+e1e3) = {inv.g2_vieta:.12g}; the cubic 4w^3 - g2 w - g3 "
            "needs the second, which is used throughout"
        )
        sys.stderr.write(f"warning: {msg}\n")
        return [msg]
    return []


# ---------------------------------------------------------------- commands


def cmd_elliptic(args) -> dict:
    ell = _elliptic_from_args(args)
    params = {"op": args.op, "g2": ell.g2, "g3": ell.g3}
    if args.op == "periods":
        result = {
            "roots": list(ell.roots),
            "half_periods": list(ell.half_periods),
            "basis": list(ell.basis),
            "quasi_periods": list(ell.quasi),
            "discriminant": ell.discriminant,
        }
    elif args.op == "wp_inverse":
        if args.E is None:
            raise ParseError("--E is required for op wp_inverse")
        params["E"] = args.E
        result = wp_inverse(args.E, ell)
    else:
        if args.z is None:
            raise ParseError(f"--z is required for op {args.op}")
        params["z"] = args.z
        fn = {"wp": wp, "wp_prime": wp_prime, "zeta": zeta, "sigma": wsigma}[args.op]
        result = fn(args.z, ell)
    return {"command": "elliptic", "params": params, "warnings": _g2_warning(ell), "result": result}


def cmd_band_edges(args) -> dict:
    be = band_edges(args.s, args.g2)
    doc = {"command": "band-edges", "params": {"s": args.s, "g2": args.g2, "g3": args.g3}}
    doc.update(be.to_json())
    return doc


def cmd_euler_top(args) -> dict:
    top = build_euler_top(args.s, args.g2, args.g3, args.j)
    params = {"s": args.s, "j": str(top.j), "g2": args.g2, "g3": args.g3}
    doc = {"command": "euler-top", "params": params}
    doc.update(top.to_json())
    if top.dim <= 64:
        doc["charpoly"] = charpoly(top.matrix).to_json()
    if args.diagnostic:
        doc["diagnostic"] = spectral_poly_diagnostic(args.s, args.g2, args.g3, args.j)
    return doc


def _load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def cmd_ssf_krein(args):
    try:
        pair = OperatorPair.from_json(_load_json(args.pair))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed pair file: {exc}") from exc
    grid = args.grid
    if args.method == "counting":
        sample = counting_ssf(pair, grid)
    else:
        ladder = tuple(args.eps) if args.eps else None
        sample = ssf_via_arg(pair, grid, ladder)
    steps = ssf_steps(pair)
    l1, tn = ssf_l1_bound_check(pair)
    params = {
        "pair": args.pair,
        "grid": args.grid_text,
        "n": pair.n,
        "method": args.method,
        "trace_V": pair.trace_V,
        "integral_xi_exact": steps.integral(),
        "integral_xi_trapezoid": sample.trapezoid(),
        "l1_xi": l1,
        "trace_norm_V": tn,
    }
    if args.method == "arg_limit":
        params["eps"] = list(args.eps) if args.eps else "auto"
    if args.format == "json":
        return {
            "command": "ssf-krein",
            "params": params,
            "method": sample.method,
            "lambda": sample.grid,
            "xi": sample.xi,
        }
    return _csv_with_header("ssf-krein", params, sample.to_csv())


def _csv_with_header(command: str, params: dict, body: str) -> str:
    lines = [f"# command={command}"]
    for k, v in params.items():
        lines.append(f"# {k}={json.dumps(_jsonable(v))}")
    return "\n".join(lines) + "\n" + body


def cmd_lame_green(args) -> dict:
    ell = _elliptic_from_args(args)
    p = LameSolutionParams(args.eps, args.K1, args.K2, ell)
    params = {
        "g2": ell.g2,
        "g3": ell.g3,
        "eps": args.eps,
        "K1": args.K1,
        "K2": args.K2,
        "kappa": args.kappa,
        "w": args.w,
    }
    doc = {"command": "lame-green", "params": params, "B": p.B}
    doc["green_kernel"] = green_kernel(args.w, p, args.kappa).to_json()
    if args.z is not None:
        params["z"] = args.z
        doc["f"] = lame_solution(args.z, p)
        doc["residual_B_plus"] = abs(lame_residual(args.z, p, -1))
        doc["residual_B_minus"] = abs(lame_residual(args.z, p, +1))
    if args.lam is not None:
        params["lambda"] = args.lam
        doc["ssf"] = lame_ssf(args.lam, args.w, p, args.kappa).to_json()
    return doc


def _bh_params(args) -> BHParams:
    if args.params:
        try:
            return BHParams.from_json(_load_json(args.params))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise ParseError(f"malformed BH parameter file: {exc}") from exc
    if args.s is None:
        raise ParseError("either --params or --s/--g2/--g3 is required")
    return BHParams.from_invariants(args.s, args.g2, args.g3, args.sigma, args.A)


def cmd_bh_green(args):
    p = _bh_params(args)
    q = symbol_coefficients(p)
    ws = args.w_grid + 1j * args.w_imag
    params = dict(p.to_json())
    params.update({"w_grid": args.w_grid_text, "w_imag": args.w_imag, "lambda": args.lam,
                   "selector_root": args.selector_root, "reflect": args.reflect})
    rows = []
    for w in ws:
        g = green_bh(w, p, args.selector_root)
        xp, xm = ssf_bh(args.lam, w, p, args.reflect)
        rows.append((w, g.G_plus, g.G_minus, xp, xm))
    if args.format == "json":
        return {
            "command": "bh-green",
            "params": params,
            "symbol": q._asdict(),
            "rows": [
                {"w": w, "G_plus": gp, "G_minus": gm, "xi_plus": xp, "xi_minus": xm}
                for w, gp, gm, xp, xm in rows
            ],
        }
    buf = io.StringIO()
    buf.write("w_re,w_im,G_plus_re,G_plus_im,G_minus_re,G_minus_im,"
              "xi_plus_re,xi_plus_im,xi_minus_re,xi_minus_im\n")
    for row in rows:
        buf.write(",".join(repr(float(x)) for c in row for x in (c.real, c.imag)) + "\n")
    return _csv_with_header("bh-green", params, buf.getvalue())


def cmd_bh_table_check(args) -> dict:
    p = _bh_params(args)
    return {"command": "bh-table-check", "params": p.to_json(), "report": bh_table_check(p)}


def _seed() -> int:
    env = os.environ.get("LAME_SPECTRA_SEED")
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError as exc:
        raise ParseError(f"LAME_SPECTRA_SEED must be an integer, got {env!r}") from exc


def cmd_diagnostics(args) -> dict:
    seed = _seed()
    rng = np.random.default_rng(seed)
    params = {"s_max": args.s_max, "g2": args.g2, "g3": args.g3, "seed": seed}
    euler = []
    for s in range(1, args.s_max + 1):
        for j in (Fraction(s), Fraction(3 * s, 2)):
            rep = spectral_poly_diagnostic(s, args.g2, args.g3, j)
            euler.append({k: rep[k] for k in (
                "s", "j", "matrix_degree", "product_degree", "degree_mismatch",
                "root_set_hausdorff", "max_coefficient_diff", "root_matching_distance", "agree",
                "matrix_roots", "product_roots",
            )})
    bh = []
    for s in range(1, args.s_max + 1):
        try:
            bh.append(bh_table_check(BHParams.from_invariants(s, args.g2, args.g3, args.sigma)))
        except DomainError as exc:
            bh.append({"s": s, "error": str(exc)})
    krein = []
    for _ in range(5):
        n = int(rng.integers(2, 7))
        pair = random_pair(n, int(rng.integers(1, min(3, n) + 1)), rng)
        tf = trace_formula_check(pair, [0.0, 1.0, 0.5, -0.25])
        l1, tn = ssf_l1_bound_check(pair)
        krein.append({
            "n": n, "rank_V": pair.rank_V, "trace_formula_diff": tf.diff,
            "integral_xi": ssf_steps(pair).integral(), "trace_V": pair.trace_V,
            "l1_xi": l1, "trace_norm_V": tn,
        })
    return {"command": "diagnostics", "params": params, "euler_top": euler,
            "bh_table_check": bh, "krein": krein}


# ---------------------------------------------------------------- parser


def _add_invariants(p, roots: bool = True):
    p.add_argument("--g2", type=parse_complex, default=complex(4.0))
    p.add_argument("--g3", type=parse_complex, default=complex(1.0))
    if roots:
        p.add_argument("--roots", type=parse_complex, nargs=3, metavar="E",
                       help="build the lattice from e1 e2 e3 instead of g2, g3")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="lame-spectra", description="Lame spectra, Krein spectral shift and BH symbols")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--output", "-o", default="-", help="output path (default stdout)")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("elliptic", help="wp, wp', zeta, sigma, wp^-1 or periods")
    p.add_argument("--op", choices=["wp", "wp_prime", "zeta", "sigma", "wp_inverse", "periods"],
                   default="wp")
    p.add_argument("--z", type=parse_complex)
    p.add_argument("--E", type=parse_complex)
    _add_invariants(p)
    p.set_defaults(func=cmd_elliptic)

    p = sub.add_parser("band-edges", help="zeros of the Lame spectral polynomial")
    p.add_argument("--s", type=int, required=True)
    _add_invariants(p, roots=False)
    p.set_defaults(func=cmd_band_edges)

    p = sub.add_parser("euler-top", help="matrix of the quantum Euler top")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--j", type=parse_spin, default=None, help="module spin (default s)")
    p.add_argument("--diagnostic", action="store_true")
    _add_invariants(p, roots=False)
    p.set_defaults(func=cmd_euler_top)

    p = sub.add_parser("ssf-krein", help="spectral shift function of a matrix pair")
    p.add_argument("--pair", required=True, help='JSON {"H0": M, "H": M} or {"H0": M, "V": M}')
    p.add_argument("--grid", required=True)
    p.add_argument("--method", choices=["counting", "arg_limit"], default="counting")
    p.add_argument("--eps", type=float, nargs="+", help="epsilon ladder (default: auto)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_ssf_krein)

    p = sub.add_parser("lame-green", help="Green kernel and spectral shift of the Lame operator")
    p.add_argument("--eps", type=parse_complex, required=True)
    p.add_argument("--K1", type=parse_complex, default=complex(1.0))
    p.add_argument("--K2", type=parse_complex, default=complex(0.0))
    p.add_argument("--kappa", type=parse_complex, default=complex(1.0))
    p.add_argument("--w", type=parse_complex, required=True)
    p.add_argument("--z", type=parse_complex, help="also evaluate f and the ODE residual here")
    p.add_argument("--lambda", dest="lam", type=float)
    _add_invariants(p)
    p.set_defaults(func=cmd_lame_green)

    for name, func in (("bh-green", cmd_bh_green), ("bh-table-check", cmd_bh_table_check)):
        p = sub.add_parser(name)
        p.add_argument("--params", help="JSON {s, sigma, g2, g3, A}")
        p.add_argument("--s", type=int)
        p.add_argument("--sigma", type=parse_sigma, default=DEFAULT_SIGMA)
        p.add_argument("--A", type=parse_complex, default=complex(0.0))
        _add_invariants(p, roots=False)
        if name == "bh-green":
            p.add_argument("--w-grid", default="-2:2:0.5")
            p.add_argument("--w-imag", type=float, default=0.0)
            p.add_argument("--lambda", dest="lam", type=float, default=1.0)
            p.add_argument("--selector-root", choices=["plus", "minus"], default="plus")
            p.add_argument("--reflect", action="store_true", help="use H(-lambda)")
            p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.set_defaults(func=func)

    p = sub.add_parser("diagnostics", help="non-asserting comparison reports")
    p.add_argument("--s-max", type=int, default=4)
    p.add_argument("--sigma", type=parse_sigma, default=DEFAULT_SIGMA)
    _add_invariants(p, roots=False)
    p.set_defaults(func=cmd_diagnostics)
    return ap


def _error(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")
    return code


_VALUE_FLAGS = ("--grid", "--w-grid")


def _glue_negative_values(argv: Sequence[str]) -> list[str]:
    # "--grid -1:5:0.01" would otherwise read -1:5:0.01 as an option
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = _glue_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
        for attr in ("grid", "w_grid"):
            if isinstance(getattr(args, attr, None), str):
                text = getattr(args, attr)
                setattr(args, attr + "_text", text)
                try:
                    setattr(args, attr, parse_grid(text))
                except argparse.ArgumentTypeError as exc:
                    raise ParseError(str(exc)) from exc
        out = args.func(args)
    except ParseError as exc:
        return _error("parse", str(exc), 2)
    except DomainError as exc:
        return _error(type(exc).__name__, str(exc), 3)
    text = out if isinstance(out, str) else dump_json(out)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
