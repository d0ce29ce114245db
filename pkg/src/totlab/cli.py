"""``totlab`` command line.

Every subcommand emits one envelope: ``schema_version``, ``command``,
``params``, ``rows`` and ``constants_used``. JSON is the default; with
``--format csv`` the envelope fields become ``#`` comment lines above a
header row. Reals are printed with 15 significant digits and integers that
do not fit a double exactly are written as decimal strings.

Defaults for the shared flags may be set through ``TOTLAB_FORMAT``,
``TOTLAB_THREADS``, ``TOTLAB_KAPPA`` and ``TOTLAB_EPSILON``.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import os
import sys
from decimal import Decimal
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from . import analytic, counting, totient, verify
from .arith import Constants
from .counting import RegimeConfig
from .errors import ArgumentError, CapacityError, PrecisionError, TotlabError

SCHEMA_VERSION = "1"
ENV_PREFIX = "TOTLAB_"


# ---------------------------------------------------------------------------
# value formatting
# ---------------------------------------------------------------------------


def fmt_real(v: float) -> Optional[str]:
    if v is None or math.isnan(v):
        return None
    return format(float(v), ".15g")


def encode(v: Any) -> Any:
    """Map a Python value to its serialized form (str, int, bool or None)."""
    if v is None or isinstance(v, (bool, str)):
        return v
    if isinstance(v, int):
        return v if abs(v) < 2**53 else str(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, Decimal):
        return fmt_real(float(v))
    if isinstance(v, float):
        return fmt_real(v)
    if hasattr(v, "item"):  # numpy scalars
        return encode(v.item())
    return str(v)


def _json_value(v: Any) -> Any:
    # reals go out as JSON numbers parsed from their 15-digit text
    enc = encode(v)
    if isinstance(v, (float, Decimal)) or (hasattr(v, "dtype") and v.dtype.kind == "f"):
        if enc is None:
            return None
        if enc in ("inf", "-inf"):
            return enc
        return json.loads(enc)
    return enc


def render(command: str, params: Dict[str, Any], rows: List[Dict[str, Any]], consts: Dict[str, Any], fmt: str) -> str:
    params_enc = {k: encode(v) for k, v in params.items()}
    consts_enc = {k: encode(v) for k, v in consts.items()}
    if fmt == "json":
        envelope = {
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "params": {k: _json_value(v) for k, v in params.items()},
            "rows": [{k: _json_value(v) for k, v in row.items()} for row in rows],
            "constants_used": {k: _json_value(v) for k, v in consts.items()},
        }
        return json.dumps(envelope, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# schema_version={SCHEMA_VERSION}\n# command={command}\n")
    for k, v in params_enc.items():
        buf.write(f"# param.{k}={'' if v is None else v}\n")
    for k, v in consts_enc.items():
        buf.write(f"# const.{k}={'' if v is None else v}\n")
    columns: List[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if encode(row.get(c)) is None else encode(row.get(c)) for c in columns])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # noqa: D401
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(2)


def _env(name: str, default: Any) -> Any:
    return os.environ.get(ENV_PREFIX + name, default)


def _int_list(text: str) -> List[int]:
    return [int(float(t)) if "e" in t.lower() else int(t) for t in text.split(",") if t.strip()]


def _str_list(text: str) -> List[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _integer(text: str) -> int:
    # accepts 10**6 spelled 1e6
    try:
        return int(text)
    except ValueError:
        f = float(text)
        if f != int(f):
            raise argparse.ArgumentTypeError(f"not an integer: {text}")
        return int(f)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default=_env("FORMAT", "json"))
    common.add_argument("--threads", type=int, default=int(_env("THREADS", 1)))
    common.add_argument("--kappa", type=str, default=_env("KAPPA", None))
    common.add_argument("--epsilon", type=float, default=float(_env("EPSILON", counting.EPSILON_DEFAULT)))

    parser = _Parser(prog="totlab", description="Generalized totient toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("phi", parents=[common], help="Phi_k(n)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=_integer, required=True)
    p.add_argument("--brute", action="store_true", help="also run the tuple enumeration")

    p = sub.add_parser("range", parents=[common], help="Phi_k(n) for n <= x")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--x", type=_integer, required=True)
    p.add_argument("--out", type=str, default=None, help="write to this file instead of stdout")
    p.add_argument("--exact", action="store_true", help="include exact Phi_k(n)")

    p = sub.add_parser("count", parents=[common], help="#{n <= x : Phi_k(n)/n^beta <= y}")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--beta", type=str, required=True)
    p.add_argument("--x", type=_integer, required=True)
    p.add_argument("--y", type=str, required=True)
    p.add_argument("--form", choices=("alpha", "phi"), default="alpha")

    p = sub.add_parser("cdf", parents=[common], help="empirical distribution of Phi_k(n)/n^k")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--x", type=_integer, required=True)
    p.add_argument("--grid", type=_str_list, required=True)

    p = sub.add_parser("constant", parents=[common], help="R_k(z), zeta, L(s, chi_1), minimal-order constant")
    p.add_argument("--which", choices=("R", "zeta", "Lchi1", "minimal"), required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--z", type=str, default=None, help="complex, e.g. 1 or 1+2j")
    p.add_argument("--s", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-10)

    p = sub.add_parser("mertens", parents=[common], help="Mertens-type products and sums")
    p.add_argument("--xs", type=_int_list, required=True)

    p = sub.add_parser("perron", parents=[common], help="numerical Perron integrals")
    p.add_argument("--mode", choices=("kernel", "count"), required=True)
    p.add_argument("--y", type=str, required=True)
    p.add_argument("--a", type=float, default=None, help="kernel abscissa")
    p.add_argument("--T", type=float, default=None, help="kernel height")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--beta", type=str, default=None)
    p.add_argument("--x", type=_integer, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--steps", type=int, default=40)
    p.add_argument("--integrand", choices=("EXACT_A", "RESIDUE_R"), default="EXACT_A")

    p = sub.add_parser("verify-distribution", parents=[common], help="exact counts against main terms")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--beta", type=str, required=True)
    p.add_argument("--x", type=_integer, required=True)
    p.add_argument("--alphas", type=_str_list, required=True)
    p.add_argument("--sample-stride", type=int, default=1000)

    p = sub.add_parser("verify-extremal", parents=[common], help="minimal and maximal order along primorials")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--smax", type=int, required=True)

    p = sub.add_parser("bateman", parents=[common], help="#{m : phi(m) <= y}")
    p.add_argument("--y", type=_integer, required=True)
    return parser


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _config(args) -> RegimeConfig:
    try:
        constants = Constants(kappa=Decimal(args.kappa)) if args.kappa else Constants()
    except ArithmeticError as exc:
        raise ArgumentError(f"bad --kappa {args.kappa!r}") from exc
    if constants.kappa <= 0 or not args.epsilon > 0:
        raise ArgumentError("--kappa and --epsilon must be positive")
    return RegimeConfig(epsilon=args.epsilon, constants=constants)


def _constants_used(config: RegimeConfig, k: Optional[int]) -> Dict[str, Any]:
    c = config.constants
    out: Dict[str, Any] = {
        "gamma": c.gamma,
        "b0": c.meissel_mertens,
        "kappa": c.kappa,
        "epsilon": config.epsilon,
    }
    if k is not None:
        out["c_k"] = config.ck(k)
    return out


def _require(args, *names: str) -> None:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise ArgumentError("missing required flags: " + ", ".join("--" + m for m in missing))


def _regime_cols(label) -> Dict[str, Any]:
    if label is None:
        return {"regime": None, "threshold_y": None}
    return {"regime": label.tag.value, "threshold_y": label.threshold_y}


def cmd_phi(args, config):
    row = {"n": args.n, "k": args.k, "phi_k": str(totient.phi_k(args.n, args.k))}
    if args.brute:
        row["phi_k_brute"] = str(totient.phi_k_brute(args.n, args.k))
    return {"k": args.k, "n": args.n, "brute": args.brute}, [row]


def cmd_range(args, config):
    rows = []
    for tv in totient.phi_k_range(args.x, args.k, exact=args.exact, threads=args.threads):
        row = {"n": tv.n, "k": tv.k, "log_ratio": tv.log_ratio}
        if args.exact:
            row["phi_k"] = str(tv.exact)
        rows.append(row)
    return {"k": args.k, "x": args.x, "exact": args.exact}, rows


def cmd_count(args, config):
    rec = counting.count_phi_ratio(args.k, args.beta, args.x, args.y, form=args.form, config=config, threads=args.threads)
    row = {"k": rec.k, "beta": rec.beta, "x": rec.x, "y": rec.y, "count": rec.count}
    row.update(_regime_cols(rec.regime))
    row["exact_checks"] = rec.exact_checks
    params = {"k": args.k, "beta": rec.beta, "x": args.x, "y": rec.y, "form": args.form}
    return params, [row]


def cmd_cdf(args, config):
    grid = [float(counting.parse_rational(g)) for g in args.grid]
    rows = [{"alpha": a, "F": f} for a, f in counting.empirical_cdf(args.k, args.x, grid)]
    return {"k": args.k, "x": args.x, "grid": ",".join(args.grid)}, rows


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise ArgumentError(f"not a complex number: {text}") from exc


def cmd_constant(args, config):
    which = args.which
    params: Dict[str, Any] = {"which": which}
    if which == "R":
        _require(args, "k", "z")
        z = _parse_complex(args.z)
        res = analytic.r_value(args.k, z, args.tol)
        params.update(k=args.k, z=args.z, tol=args.tol)
        row = {
            "re": res.value.real,
            "im": res.value.imag,
            "truncation_prime": res.truncation_prime,
            "tail_bound": res.tail_bound,
        }
    elif which == "zeta":
        _require(args, "s")
        params["s"] = args.s
        row = {"value": analytic.zeta_real(args.s)}
    elif which == "Lchi1":
        _require(args, "s")
        params["s"] = args.s
        row = {"value": analytic.l_chi1(args.s)}
    else:
        _require(args, "k")
        params["k"] = args.k
        row = {"value": verify.minimal_constant(args.k, config.constants)}
    return params, [row]


def cmd_mertens(args, config):
    rows = [
        {"x": r.x, "quantity": r.quantity, "value": r.value, "limit": r.limit, "deviation": r.deviation}
        for r in verify.verify_mertens(args.xs, config.constants)
    ]
    return {"xs": ",".join(map(str, args.xs))}, rows


def cmd_perron(args, config):
    if args.mode == "kernel":
        _require(args, "a", "T")
        y = float(counting.parse_rational(args.y))
        kc = verify.perron_kernel_check(y, args.a, args.T)
        row = {"y": kc.y, "a": kc.a, "T": kc.T, "estimate": kc.estimate, "target": kc.target, "bound": kc.bound}
        return {"mode": "kernel", "y": args.y, "a": args.a, "T": args.T}, [row]
    _require(args, "k", "beta", "x", "b", "tau")
    est = verify.perron_count_detail(
        args.k, args.beta, args.x, args.y, args.b, args.tau, steps=args.steps, mode=args.integrand
    )
    row = {
        "estimate": est.estimate,
        "coarse": est.coarse,
        "error_bound": est.error_bound,
        "residue_term": est.residue_term,
        "shifted_line": est.shifted_line,
        "horizontal": est.horizontal,
    }
    params = {
        "mode": "count",
        "integrand": args.integrand,
        "k": args.k,
        "beta": counting.parse_beta(args.beta),
        "x": args.x,
        "y": counting.parse_rational(args.y),
        "b": args.b,
        "tau": args.tau,
        "steps": args.steps,
    }
    return params, [row]


def cmd_verify_distribution(args, config):
    rows = []
    vrows = verify.verify_distribution(
        args.k, args.beta, args.x, args.alphas, config=config, sample_stride=args.sample_stride, threads=args.threads
    )
    for alpha, r in zip(args.alphas, vrows):
        row = {"alpha": alpha, "y": r.y, "exact_count": r.exact_count, "main_term": r.main_term, "rel_err": r.rel_err}
        row.update(_regime_cols(r.regime))
        row["sample_checks"] = r.sample_checks
        rows.append(row)
    params = {"k": args.k, "beta": counting.parse_beta(args.beta), "x": args.x, "alphas": ",".join(args.alphas)}
    return params, rows


def cmd_verify_extremal(args, config):
    rows = [
        {"kind": r.kind, "s": r.s, "ratio": r.ratio, "log_n": r.log_n}
        for r in verify.verify_extremal(args.k, args.smax, config.constants)
    ]
    return {"k": args.k, "smax": args.smax}, rows


def cmd_bateman(args, config):
    r = counting.bateman_count(args.y, threads=args.threads)
    row = {
        "y": r.y,
        "count": r.count,
        "ratio": r.count / r.y,
        "cutoff": r.cutoff,
        "window_min_phi": r.window_min_phi,
        "tail_lower_bound": r.tail_lower_bound,
    }
    return {"y": args.y}, [row]


COMMANDS = {
    "phi": cmd_phi,
    "range": cmd_range,
    "count": cmd_count,
    "cdf": cmd_cdf,
    "constant": cmd_constant,
    "mertens": cmd_mertens,
    "perron": cmd_perron,
    "verify-distribution": cmd_verify_distribution,
    "verify-extremal": cmd_verify_extremal,
    "bateman": cmd_bateman,
}


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    """Execute one command; returns the exit code."""
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(stderr), contextlib.redirect_stdout(stdout):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.threads < 1:
            raise ArgumentError("--threads must be >= 1")
        config = _config(args)
        params, rows = COMMANDS[args.command](args, config)
        text = render(args.command, params, rows, _constants_used(config, getattr(args, "k", None)), args.format)
    except ArgumentError as exc:
        stderr.write(f"totlab: error: {exc}\n")
        return 2
    except (CapacityError, PrecisionError) as exc:
        stderr.write(f"totlab: error: {exc}\n")
        return 3
    except TotlabError as exc:
        stderr.write(f"totlab: error: {exc}\n")
        return 1
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
