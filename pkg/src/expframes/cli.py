"""Command-line surface: construct, verify, duality, exhaust, sweep.

Reports go to stdout as JSON or CSV (CSV schemas are versioned in a header
comment).  Every numeric bound in a report is recomputed through the
verification layer before printing.  Exit codes: 0 all certificates pass,
1 certificate failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import construct as cons
from . import verify as ver
from .errors import CertificateFailed, ExpframesError, NoFeasibleCandidate
from .selection import lower_certificate_constant
from .spectrum import GridSpectrum, parse_spectrum, quantize_inner

CSV_VERSION = "expframes-csv v1"

SWEEP_COLUMNS = (
    "m", "n", "d", "J", "density", "landau_floor",
    "lower", "upper", "C_target", "s_squared", "pass",
)


def _load_spectrum(text: str):
    """Inline JSON (starts with '{') or a path to a JSON file."""
    stripped = text.strip()
    if stripped.startswith("{"):
        return parse_spectrum(stripped)
    return parse_spectrum(Path(text).read_text())


def _as_grid(spec, m_arg):
    if isinstance(spec, GridSpectrum):
        return spec
    if m_arg is None:
        raise ValueError("interval spectra need --m to fix the grid order")
    return quantize_inner(spec, int(m_arg))


def _parse_residues(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError as exc:
        raise ValueError(f"bad residue list {text!r}") from exc


def _parse_fraction_list(text: str) -> list[Fraction]:
    return [Fraction(tok.strip()) for tok in text.split(",") if tok.strip()]


def _parse_float_list(text: str) -> list[float]:
    return [float(tok.strip()) for tok in text.split(",") if tok.strip()]


def _parse_int_list(text: str) -> list[int]:
    return [int(tok.strip()) for tok in text.split(",") if tok.strip()]


def _emit_json(obj) -> None:
    sys.stdout.write(json.dumps(obj) + "\n")


def _emit_csv(columns, rows) -> None:
    out = sys.stdout
    out.write(f"# {CSV_VERSION} columns={','.join(columns)}\n")
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(_csv_cell(v) for v in row) + "\n")


def _csv_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def cmd_construct(args) -> int:
    grid = _as_grid(_load_spectrum(args.spectrum), args.m)
    if args.k is not None and args.mode != "bessel":
        raise ValueError("--k is only valid with --mode bessel")
    if args.mode == "sampling":
        if args.d is None:
            raise ValueError("--mode sampling needs --d")
        report = cons.build_sampling(grid, args.d)
        recomputed = ver.sampling_bounds(grid, report.sampling_set)
    elif args.mode == "bessel":
        report = cons.build_bessel(grid, args.k)
        recomputed = ver.sampling_bounds(grid, report.sampling_set)
    elif args.mode == "riesz":
        if args.d is None:
            raise ValueError("--mode riesz needs --d in (0, 1)")
        report = cons.build_riesz(grid, args.d)
        recomputed = ver.riesz_bounds(grid, report.sampling_set)
    else:
        raise ValueError(f"unknown mode {args.mode!r}")
    payload = report.to_dict()
    payload["lower"] = recomputed.lower
    payload["upper"] = recomputed.upper
    if args.format == "csv":
        row = report.csv_row()
        row[5], row[6] = recomputed.lower, recomputed.upper
        _emit_csv(cons.CSV_COLUMNS, [row])
    else:
        _emit_json(payload)
    return 0


def cmd_verify(args) -> int:
    grid = _as_grid(_load_spectrum(args.spectrum), args.m)
    lam = cons.SamplingSet(grid.m, _parse_residues(args.residues))
    report = ver.sampling_bounds(grid, lam)
    payload = report.to_dict()
    payload["landau_violation"] = bool(
        Fraction(len(lam.residues), lam.m) < Fraction(grid.n, grid.m)
    )
    if args.format == "csv":
        row = [
            grid.m, grid.n, len(lam.residues), float(report.density),
            float(report.landau_floor), report.lower, report.upper,
            "", not payload["landau_violation"],
        ]
        _emit_csv(cons.CSV_COLUMNS, [row])
    else:
        _emit_json(payload)
    return 0


def cmd_duality(args) -> int:
    grid = _as_grid(_load_spectrum(args.spectrum), args.m)
    lam = cons.SamplingSet(grid.m, _parse_residues(args.residues))
    report = ver.duality_check(grid, lam)
    _emit_json(report.to_dict())
    ok = report.vacuous or (report.factor_two_pass and report.exact_identity_pass)
    return 0 if ok else 1


def cmd_exhaust(args) -> int:
    spec = _load_spectrum(args.spectrum)
    if isinstance(spec, GridSpectrum):
        spec = spec.to_interval_set()
    schedule = _parse_int_list(args.schedule)
    stages = cons.exhaust_general(spec, args.d, schedule, mode=args.mode)
    if args.format == "json":
        _emit_json([st.to_dict() for st in stages])
    else:
        _emit_csv(cons.CSV_COLUMNS, [st.csv_row() for st in stages])
    return 0


def _sweep_case(m: int, frac: Fraction, d: float, seed: int):
    n = int(m * frac)
    if n < 1:
        raise ValueError(f"|S| fraction {frac} empty at m={m}")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed, m, n)))
    cells = tuple(sorted(int(r) for r in rng.choice(m, size=n, replace=False)))
    grid = GridSpectrum(m, cells)
    report = cons.build_sampling(grid, d)
    recomputed = ver.sampling_bounds(grid, report.sampling_set)
    s_meas = n / m
    target = lower_certificate_constant(d) * s_meas
    return [
        m, n, d, len(report.sampling_set.residues),
        float(report.density), float(report.landau_floor),
        recomputed.lower, recomputed.upper, target, s_meas**2,
        bool(recomputed.lower >= target),
    ]


def cmd_sweep(args) -> int:
    ms = _parse_int_list(args.m_list)
    fracs = _parse_fraction_list(args.s_list)
    ds = _parse_float_list(args.d_list)
    points = [(m, frac, d) for m in ms for frac in fracs for d in ds]
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(lambda p: _sweep_case(*p, args.seed), points))
    else:
        rows = [_sweep_case(m, frac, d, args.seed) for m, frac, d in points]
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    if args.format == "json":
        _emit_json([dict(zip(SWEEP_COLUMNS, row)) for row in rows])
    else:
        _emit_csv(SWEEP_COLUMNS, rows)
    return 0 if all(row[-1] for row in rows) else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expframes",
        description="Certified sampling, Bessel and Riesz set construction on grid spectra.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, residues=False):
        p.add_argument("--spectrum", required=True,
                       help="inline JSON or path; grid or interval descriptor")
        p.add_argument("--m", type=int, default=None,
                       help="grid order used to quantize an interval spectrum")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        if residues:
            p.add_argument("--residues", required=True, help="comma-separated residues")

    p_con = sub.add_parser("construct", help="build a certified set for a spectrum")
    add_common(p_con)
    p_con.add_argument("--mode", choices=("sampling", "bessel", "riesz"), default="sampling")
    p_con.add_argument("--d", type=float, default=None)
    p_con.add_argument("--k", type=int, default=None, help="bessel size (default n+1)")
    p_con.set_defaults(func=cmd_construct)

    p_ver = sub.add_parser("verify", help="recompute bounds for a (spectrum, residues) pair")
    add_common(p_ver, residues=True)
    p_ver.set_defaults(func=cmd_verify)

    p_dua = sub.add_parser("duality", help="sampling vs complement-Riesz bound check")
    add_common(p_dua, residues=True)
    p_dua.set_defaults(func=cmd_duality)

    p_exh = sub.add_parser("exhaust", help="stagewise constructions over a schedule")
    add_common(p_exh)
    p_exh.add_argument("--d", type=float, default=1.0)
    p_exh.add_argument("--mode", choices=("sampling", "bessel"), default="sampling")
    p_exh.add_argument("--schedule", required=True, help='grid orders, e.g. "16,32,64"')
    p_exh.set_defaults(func=cmd_exhaust)
    p_exh.set_defaults(format="csv")

    p_swp = sub.add_parser("sweep", help="bound-vs-density grid for plotting")
    p_swp.add_argument("--m-list", required=True, help='e.g. "32,64"')
    p_swp.add_argument("--s-list", required=True, help='measure fractions, e.g. "1/16,1/8"')
    p_swp.add_argument("--d-list", required=True, help='e.g. "0.5,1,3"')
    p_swp.add_argument("--seed", type=int, default=0)
    p_swp.add_argument("--jobs", type=int, default=1)
    p_swp.add_argument("--format", choices=("json", "csv"), default="csv")
    p_swp.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CertificateFailed, NoFeasibleCandidate) as exc:
        print(f"certificate failure: {exc}", file=sys.stderr)
        return 1
    except (ExpframesError, ValueError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
