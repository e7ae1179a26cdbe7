"""Command line front end.

Subcommands ``classify``, ``reduce``, ``lyap``, ``sweep`` and ``cf``.  Output is
deterministic JSON (sorted keys) or CSV for sweeps.  Exit status: 0 on
success, 2 when a solver precondition fails (the JSON then carries the
failing step and its margins), 1 on any other error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import mpmath
import numpy as np

from .arithmetic import DEFAULT_PREC, expand, parse_frequency
from .cocycle import Cocycle, almost_mathieu, classify, lyapunov, schrodinger
from .errors import PrecisionExhausted, ReductionError
from .reducer import ReductionConfig, reduce, transfer_to_irrational
from .strip import MatrixFunction, StripFunction

CSV_FIELDS = ("energy", "lambda", "L0", "classification", "case", "residual", "error")


# ----------------------------------------------------------------------
# job assembly


def load_config(path: str | None, eps0: float | None) -> ReductionConfig:
    """Config JSON uses the field names of :class:`ReductionConfig`."""
    data = {}
    if path:
        with open(path) as fh:
            data = json.load(fh)
    if eps0 is not None:
        data["strip_ladder"] = [eps0 * f for f in (1.0, 0.9, 0.8, 0.7)]
    return ReductionConfig(**data)


def _frequency(args) -> tuple[object, object]:
    """Return (exact value for the cocycle, raw parsed value)."""
    raw = parse_frequency(args.freq, getattr(args, "prec", DEFAULT_PREC))
    if isinstance(raw, Fraction):
        return raw, raw
    return float(raw), raw


def build_cocycle(args, frequency) -> Cocycle:
    if args.family == "amo":
        return almost_mathieu(args.lam, args.energy, frequency, half_width=args.half_width)
    if args.family == "schrodinger":
        if not args.cos:
            raise ValueError("--family schrodinger needs --cos a1,a2,...")
        coeffs = [float(x) for x in args.cos.split(",")]
        modes = {}
        for k, a in enumerate(coeffs, start=1):
            modes[k] = a / 2
            modes[-k] = a / 2
        v = StripFunction.from_modes(modes, args.half_width)
        return schrodinger(v, args.energy, frequency)
    if args.family == "file":
        if not args.file:
            raise ValueError("--family file needs --file")
        with open(args.file) as fh:
            data = json.load(fh)
        mf = MatrixFunction.from_dict(data.get("map", data))
        return Cocycle(frequency, mf)
    raise ValueError(f"unknown family {args.family}")


# ----------------------------------------------------------------------
# commands


def cmd_cf(args) -> dict:
    try:
        cf = expand(args.alpha, args.terms, args.prec)
        return cf.to_dict()
    except PrecisionExhausted as exc:
        out = exc.to_dict()
        out["prefix"] = exc.prefix
        raise _Handled(out, 2) from exc


def cmd_lyap(args) -> dict:
    freq, _ = _frequency(args)
    c = build_cocycle(args, freq)
    return {"lyapunov": lyapunov(c, args.eps, args.n, args.grid), "eps": args.eps, "n": args.n}


def cmd_classify(args) -> dict:
    freq, _ = _frequency(args)
    c = build_cocycle(args, freq)
    eps_grid = [float(x) for x in args.eps_grid.split(",")]
    return classify(c, eps_grid, args.n, grid=args.grid).to_dict()


def _reduce_frequency(args, raw):
    """Rational frequency to reduce at: the input itself or its convergent."""
    if isinstance(raw, Fraction) and args.terms is None:
        return raw
    cf = expand(args.freq, args.terms or 10, args.prec)
    p, q = cf.convergents[-1]
    return Fraction(p, q)


def cmd_reduce(args) -> dict:
    cfg = load_config(args.config, args.eps0)
    _, raw = _frequency(args)
    pq = _reduce_frequency(args, raw)
    c = build_cocycle(args, pq)
    res = reduce(c, cfg)
    out = res.to_dict(include_functions=not args.summary)
    out["config"] = cfg.to_dict()
    if not (isinstance(raw, Fraction) and raw == pq):
        out["transfer_bound"] = transfer_to_irrational(res, c.map.astype(cfg.dtype), raw,
                                                       cfg.eps * 0.9)
    return out


def _sweep_point(payload: tuple) -> dict:
    """One sweep row; module level so worker processes can import it."""
    args_dict, energy = payload
    args = argparse.Namespace(**args_dict)
    args.energy = energy
    row = {k: "" for k in CSV_FIELDS}
    row["energy"] = repr(float(energy))
    row["lambda"] = repr(float(args.lam))
    try:
        freq, raw = _frequency(args)
        if args.task in ("classify", "lyap"):
            c = build_cocycle(args, freq)
            if args.task == "classify":
                rep = classify(c, [float(x) for x in args.eps_grid.split(",")], args.n,
                               grid=args.grid)
                row["L0"] = repr(rep.L0)
                row["classification"] = rep.classification
            else:
                row["L0"] = repr(lyapunov(c, 0.0, args.n, args.grid))
        else:
            cfg = load_config(args.config, args.eps0)
            pq = _reduce_frequency(args, raw)
            res = reduce(build_cocycle(args, pq), cfg)
            row["case"] = res.case
            row["residual"] = repr(res.residual)
    except ReductionError as exc:
        row["error"] = f"{type(exc).__name__}:{exc.lemma}"
    return row


def _energies(spec: str) -> list[float]:
    if ":" in spec:
        a, b, n = spec.split(":")
        return [float(x) for x in np.linspace(float(a), float(b), int(n))]
    return [float(x) for x in spec.split(",")]


def cmd_sweep(args) -> list[dict]:
    energies = _energies(args.energies)
    base = {k: v for k, v in vars(args).items() if k != "func"}
    payloads = [(base, e) for e in energies]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_sweep_point, payloads))  # map keeps input order
    else:
        rows = [_sweep_point(p) for p in payloads]
    return rows


# ----------------------------------------------------------------------
# output


class _Handled(Exception):
    def __init__(self, payload: dict, status: int):
        super().__init__(payload.get("message", ""))
        self.payload = payload
        self.status = status


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_default) + "\n"


def _default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, (mpmath.mpf,)):
        return str(x)
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    raise TypeError(f"not serialisable: {type(x).__name__}")


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------------
# parser


def _add_cocycle_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=("amo", "schrodinger", "file"), default="amo")
    p.add_argument("--lambda", dest="lam", type=float, default=0.5)
    p.add_argument("--energy", type=float, default=0.0)
    p.add_argument("--freq", default="golden",
                   help="p/q, a decimal string, or golden/silver/sqrt2/e/pi")
    p.add_argument("--cos", default=None, help="cosine coefficients a1,a2,... (schrodinger)")
    p.add_argument("--file", default=None, help="JSON MatrixFunction (family=file)")
    p.add_argument("--half-width", type=float, default=0.25)
    p.add_argument("--grid", type=int, default=128)
    p.add_argument("--prec", type=int, default=DEFAULT_PREC)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arcocycle", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cf", help="continued fraction expansion")
    p.add_argument("alpha")
    p.add_argument("--terms", type=int, default=12)
    p.add_argument("--prec", type=int, default=DEFAULT_PREC)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json",), default="json")
    p.set_defaults(func=cmd_cf)

    p = sub.add_parser("lyap", help="finite-n Lyapunov exponent")
    _add_cocycle_args(p)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--n", type=int, default=10000)
    p.set_defaults(func=cmd_lyap)

    p = sub.add_parser("classify", help="UH / supercritical / subcritical / critical")
    _add_cocycle_args(p)
    p.add_argument("--eps-grid", default="0,0.02,0.04,0.06")
    p.add_argument("--n", type=int, default=2000)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("reduce", help="reduce at a rational frequency")
    _add_cocycle_args(p)
    p.add_argument("--eps0", type=float, default=None)
    p.add_argument("--terms", type=int, default=None,
                   help="reduce at the convergent with this many partial quotients")
    p.add_argument("--config", default=None)
    p.add_argument("--summary", action="store_true", help="omit Fourier data of B and theta")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("sweep", help="parameter sweep over energies")
    _add_cocycle_args(p)
    p.add_argument("--energies", default="-3:3:13", help="start:stop:num or a comma list")
    p.add_argument("--task", choices=("classify", "reduce", "lyap"), default="classify")
    p.add_argument("--eps-grid", default="0,0.02,0.04,0.06")
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--eps0", type=float, default=None)
    p.add_argument("--terms", type=int, default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = getattr(args, "out", None)
    try:
        result = args.func(args)
    except _Handled as exc:
        _emit(dumps(exc.payload), out)
        return exc.status
    except ReductionError as exc:
        _emit(dumps(exc.to_dict()), out)
        return 2
    except Exception as exc:  # noqa: BLE001 - mapped to exit status 1
        sys.stderr.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return 1
    if isinstance(result, list):
        text = rows_to_csv(result) if args.format == "csv" else dumps(result)
    else:
        text = dumps(result)
    _emit(text, out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
