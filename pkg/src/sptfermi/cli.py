"""Command-line front end.

Every subcommand takes the same system options (model, particle number,
interaction parameters) and output options.  Values may also come from a
flat ``key = value`` config file; command-line flags win over the file.

Exit codes:
  0  success
  2  bad command-line usage
  3  config file unreadable or invalid
  4  a computation stage failed
  5  input/output error
  6  --oracle-check found a mismatch
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .assembler import (CACHE_ENV, BuildingBlockCache, PipelineError, building_blocks,
                        compare, extrapolate_zero_range, read_records, read_references,
                        run_pipeline, sweep, write_records)
from .core import SystemSpec
from .interaction import HarmonicPair, NonInteracting, SquareWellContinued, tune_unitarity, unitary_well
from .pauli import enumerate_spectrum, partition_function
from .spectrum import MODE_LABELS

logger = logging.getLogger("sptfermi")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_STAGE = 4
EXIT_IO = 5
EXIT_ORACLE = 6


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# configuration

_CONFIG_KEYS = {
    "model": str, "n": lambda v: (parse_n_range(v), v)[1], "n_up": int, "n_down": int, "lambda": float, "r": float,
    "depth": float, "hw": float, "format": str, "output": str, "cache_dir": str,
    "oracle_check": bool, "e_max": float, "beta": str, "n_range": str, "r_list": str,
    "refs": str, "reference": str,
}
_MODEL_FIELDS = {"ideal": set(), "harmonic": {"lambda"}, "unitary": {"r"}, "well": {"r", "depth"}}


@dataclass
class RunConfig:
    model: str = "ideal"
    n: str | None = None
    n_up: int | None = None
    n_down: int | None = None
    coupling: float | None = None
    radius: float | None = None
    depth: float | None = None
    hw: float | None = None
    format: str = "text"
    output: str | None = None
    cache_dir: str | None = None
    oracle_check: bool = False
    verbose: int = 0
    extra: dict = field(default_factory=dict)

    def interaction(self):
        if self.model == "ideal":
            return NonInteracting()
        if self.model == "harmonic":
            if self.coupling is None:
                raise ConfigError("model 'harmonic' needs lambda")
            return HarmonicPair(self.coupling)
        if self.model == "unitary":
            return unitary_well(self.radius if self.radius is not None else 0.01)
        if self.model == "well":
            if self.depth is None:
                raise ConfigError("model 'well' needs depth")
            return SquareWellContinued(self.radius if self.radius is not None else 0.01, self.depth)
        raise ConfigError(f"unknown model {self.model!r}")

    def system(self, n: int | None = None) -> SystemSpec:
        inter = self.interaction()
        if n is None and self.n_up is not None and self.n_down is not None:
            return SystemSpec(self.n_up, self.n_down, inter)
        if n is None:
            if self.n is None:
                raise ConfigError("particle number not given (use --n or --n-up/--n-down)")
            try:
                n = int(self.n)
            except ValueError:
                raise ConfigError(f"n: expected one particle number, got {self.n!r}") from None
        return SystemSpec.balanced(n, inter)


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def load_config(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment.

    Returns a mapping of recognised keys to typed values.  Errors cite the
    line number and key.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from exc
    values, seen = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_").lower()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"{path}:{lineno}: key {key!r} already set on line {seen[key]}")
        value = value.strip().strip('"').strip("'")
        conv = _CONFIG_KEYS[key]
        try:
            values[key] = _parse_bool(value) if conv is bool else conv(value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from exc
        seen[key] = lineno
    return values


def validate_model_fields(values: dict) -> None:
    """Reject parameters that belong to a different model than the one chosen."""
    model = values.get("model", "ideal")
    if model not in _MODEL_FIELDS:
        raise ConfigError(f"model: unknown model {model!r} (choose from {sorted(_MODEL_FIELDS)})")
    for key in ("lambda", "r", "depth"):
        if values.get(key) is not None and key not in _MODEL_FIELDS[model]:
            raise ConfigError(f"conflicting fields: model={model!r} does not take {key!r}")


def build_run_config(args) -> RunConfig:
    values = load_config(args.config) if args.config else {}
    flag_map = {"model": args.model, "n": args.n, "n_up": args.n_up, "n_down": args.n_down,
                "lambda": args.coupling, "r": args.r, "depth": args.depth, "hw": args.hw,
                "format": args.format, "output": args.output, "cache_dir": args.cache_dir}
    for key, val in flag_map.items():
        if val is not None:
            values[key] = val
    if args.oracle_check:
        values["oracle_check"] = True
    if getattr(args, "command", None) == "tune":
        values.setdefault("model", "unitary")
    validate_model_fields(values)
    fmt = values.get("format", "text")
    if fmt not in ("text", "csv", "json"):
        raise ConfigError(f"format: expected text, csv or json, got {fmt!r}")
    if values.get("hw") is not None and not values["hw"] > 0:
        raise ConfigError("hw must be positive")
    out = values.get("output")
    if out is not None:
        parent = Path(out).resolve().parent
        if not parent.is_dir() or not os.access(parent, os.W_OK):
            raise OSError(f"output directory {parent} is not writable")
    extra = {k: v for k, v in values.items() if k in ("e_max", "beta", "n_range", "r_list",
                                                      "refs", "reference")}
    return RunConfig(model=values.get("model", "ideal"), n=values.get("n"),
                     n_up=values.get("n_up"), n_down=values.get("n_down"),
                     coupling=values.get("lambda"), radius=values.get("r"),
                     depth=values.get("depth"), hw=values.get("hw"), format=fmt,
                     output=out, cache_dir=values.get("cache_dir") or os.environ.get(CACHE_ENV),
                     oracle_check=bool(values.get("oracle_check", False)),
                     verbose=args.verbose, extra=extra)


def parse_n_range(text: str) -> list[int]:
    """'6..30', '6..30:2', '4,6,9' or a single integer."""
    text = text.strip()
    if ".." in text:
        lo, _, rest = text.partition("..")
        hi, _, step = rest.partition(":")
        values = list(range(int(lo), int(hi) + 1, int(step) if step else 1))
    else:
        values = [int(x) for x in text.split(",") if x.strip()]
    if not values or min(values) < 2:
        raise ValueError(f"bad particle-number range {text!r}")
    return values


def parse_floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


# --------------------------------------------------------------------------
# output


def _energy_scale(cfg: RunConfig) -> tuple[float, str]:
    return (cfg.hw, "energy units") if cfg.hw else (1.0, "hbar*omega_ho")


def emit(records, cfg: RunConfig, title: str | None = None, stream=None) -> None:
    """Write a list of flat dicts (or one dict) to --output or stdout."""
    stream = stream or sys.stdout
    single = isinstance(records, dict)
    rows = [records] if single else list(records)
    if cfg.output:
        fmt = cfg.format if cfg.format != "text" else ("json" if cfg.output.endswith(".json") else "csv")
        if fmt == "json" and single:
            Path(cfg.output).write_text(json.dumps(records, indent=1) + "\n")
        else:
            write_records(rows, cfg.output, fmt)
        logger.info("wrote %s", cfg.output)
        return
    if cfg.format == "json":
        stream.write(json.dumps(records if single else rows, indent=1) + "\n")
    elif cfg.format == "csv":
        if rows:
            keys = list(rows[0])
            stream.write(",".join(keys) + "\n")
            for r in rows:
                stream.write(",".join(_cell(r[k], csv_mode=True) for k in keys) + "\n")
    else:
        if title:
            stream.write(title + "\n")
        if single:
            width = max(len(k) for k in records)
            for k, v in records.items():
                stream.write(f"  {k:<{width}}  {_cell(v)}\n")
        elif rows:
            keys = list(rows[0])
            cells = [[_cell(r[k]) for k in keys] for r in rows]
            widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
            stream.write("  ".join(k.rjust(w) for k, w in zip(keys, widths)) + "\n")
            for c in cells:
                stream.write("  ".join(x.rjust(w) for x, w in zip(c, widths)) + "\n")


def _cell(v, csv_mode: bool = False) -> str:
    if isinstance(v, float):
        return repr(float(v)) if csv_mode else f"{v:.10g}"
    if isinstance(v, (dict, list, tuple)):
        return json.dumps(v)
    return str(v)


def write_series(path_prefix: str, xs, ys) -> Path:
    path = Path(path_prefix)
    with open(path, "w") as fh:
        for x, y in zip(xs, ys):
            fh.write(f"{int(x)} {float(y)!r}\n")
    return path


# --------------------------------------------------------------------------
# subcommands


def cmd_tune(cfg: RunConfig, args) -> int:
    radius = cfg.radius if cfg.radius is not None else 0.01
    if cfg.model not in ("unitary", "well"):
        raise ConfigError("tune requires a square-well model (--model unitary)")
    t = tune_unitarity(radius)
    emit({"radius": t.radius, "depth": t.v_depth, "b": t.b, "k0_radius": t.k0_radius,
          "inverse_scattering_length": t.inverse_scattering_length}, cfg, "unitarity tuning")
    return EXIT_OK


def cmd_minimize(cfg: RunConfig, args) -> int:
    minimum, _ = building_blocks(cfg.system(), _cache(cfg), cfg.oracle_check)
    rec = minimum.as_dict()
    rec["reduced_hessian"] = json.dumps(rec["reduced_hessian"])
    emit(rec, cfg, "symmetric large-D minimum (scaled units)")
    return EXIT_OK


def cmd_modes(cfg: RunConfig, args) -> int:
    _, spectrum = building_blocks(cfg.system(), _cache(cfg), cfg.oracle_check)
    rows = []
    for m in MODE_LABELS:
        rows.append({"mode": m, "omega": spectrum.omega[m], "multiplicity": spectrum.multiplicity[m],
                     "radial_weight": spectrum.radial_weight.get(m, math.nan)})
    emit(rows, cfg, f"normal modes, N={spectrum.n_particles}, v0 = {spectrum.v0:.12g}")
    return EXIT_OK


def cmd_energy(cfg: RunConfig, args) -> int:
    ref = args.reference or cfg.extra.get("reference", "fermion")
    result = run_pipeline(cfg.system(), _cache(cfg), reference=ref, oracle_check=cfg.oracle_check)
    scale, unit = _energy_scale(cfg)
    if cfg.format == "text" and not cfg.output:
        print(f"E = {result.total_unscaled * scale!r} {unit}")
        for k, v in result.breakdown.items():
            print(f"  {k:>3}: {v:.10g} (scaled)")
        occ = ", ".join(f"{m}={c}" for m, c in zip(MODE_LABELS, result.occupancy))
        print(f"  occupancy: {occ}")
        return EXIT_OK
    rec = result.as_dict()
    rec["energy"] = result.total_unscaled * scale
    emit(rec, cfg)
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, args) -> int:
    n_text = args.n_range or cfg.extra.get("n_range") or cfg.n
    if not n_text:
        raise ConfigError("sweep needs --n 6..30 (or --n-range)")
    ref = args.reference or cfg.extra.get("reference", "fermion")
    template = cfg.system(n=2)
    table = sweep(template, parse_n_range(n_text), _cache(cfg), reference=ref,
                  oracle_check=cfg.oracle_check)
    scale, _ = _energy_scale(cfg)
    records = table.as_records()
    for r in records:
        r["E"] *= scale
        r["dE"] *= scale
    emit(records, cfg, "sweep")
    stag = table.staggering()
    logger.info("monotone=%s staggering=%s", table.monotone_increasing(), stag)
    if cfg.format == "text" and not cfg.output:
        print(f"monotone increasing: {table.monotone_increasing()}; "
              f"odd-even alternation {stag['alternation']:.3f}, "
              f"odd minus even dE {stag['odd_minus_even']:.4g}")
    if args.series:
        write_series(args.series + "_energy.dat", table.n_values, table.energies * scale)
        diffs = table.first_differences()
        write_series(args.series + "_diff.dat", [n for n, _ in diffs], [d * scale for _, d in diffs])
    refs = args.compare or cfg.extra.get("refs")
    if refs:
        report = compare(table, read_references(refs))
        _emit_report(report)
    for n, msg in table.failures.items():
        print(f"N={n} failed: {msg}", file=sys.stderr)
    return EXIT_STAGE if table.failures else EXIT_OK


def _emit_report(report) -> None:
    print("comparison with references")
    for r in report.rows:
        flag = "  FLAG" if r["flagged"] else ""
        print(f"  N={r['N']:>3} {r['source']:<12} E={r['E']:.6g} E_ref={r['E_ref']:.6g} "
              f"dev={r['deviation']:+.4g} rel={r['relative']:+.3%}{flag}")
    s = report.summary()
    print(f"  {s['count']} rows, {s['flagged']} flagged, mean |dev| {s['mean_abs_deviation']:.4g}, "
          f"max |dev| {s['max_abs_deviation']:.4g}")


def cmd_compare(cfg: RunConfig, args) -> int:
    refs = args.refs or cfg.extra.get("refs")
    if not args.table or not refs:
        raise ConfigError("compare needs --table and --refs")
    rows = read_records(args.table)
    energies = {int(r["N"]): float(r["E"]) for r in rows}
    report = compare(energies, read_references(refs))
    if cfg.format == "text" and not cfg.output:
        _emit_report(report)
    else:
        emit(report.rows, cfg)
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig, args) -> int:
    spec = cfg.system()
    minimum, spectrum = building_blocks(spec, _cache(cfg), cfg.oracle_check)
    e_max = args.e_max if args.e_max is not None else cfg.extra.get("e_max")
    if e_max is None:
        raise ConfigError("spectrum needs --e-max")
    levels = enumerate_spectrum(spectrum, spec, e_max, minimum.e_infinity)
    emit([lv.as_row() for lv in levels], cfg, f"levels up to E = {e_max}")
    return EXIT_OK


def cmd_partition(cfg: RunConfig, args) -> int:
    spec = cfg.system()
    minimum, spectrum = building_blocks(spec, _cache(cfg), cfg.oracle_check)
    e_max = args.e_max if args.e_max is not None else cfg.extra.get("e_max")
    betas = args.beta or cfg.extra.get("beta")
    if e_max is None or not betas:
        raise ConfigError("partition needs --e-max and --beta")
    levels = enumerate_spectrum(spectrum, spec, e_max, minimum.e_infinity)
    rows = []
    for beta in parse_floats(betas):
        p = partition_function(levels, beta)
        rows.append({"beta": p.beta, "Z": p.z, "ground_energy": p.ground_energy,
                     "tail_estimate": p.tail_estimate})
    emit(rows, cfg, "partition function (ground-referenced)")
    return EXIT_OK


def cmd_extrapolate(cfg: RunConfig, args) -> int:
    text = args.r_list or cfg.extra.get("r_list")
    if not text:
        raise ConfigError("extrapolate needs --r-list")
    res = extrapolate_zero_range(cfg.system(), parse_floats(text), _cache(cfg))
    scale, _ = _energy_scale(cfg)
    emit({"e_zero_range": res.e_zero_range * scale, "slope": res.slope * scale,
          "residual": res.residual, "degree": res.degree, "monotone": res.monotone,
          "ranges": list(res.ranges), "energies": [e * scale for e in res.energies]},
         cfg, "zero-range extrapolation")
    return EXIT_OK


def cmd_cache(cfg: RunConfig, args) -> int:
    if not cfg.cache_dir:
        raise ConfigError(f"cache commands need --cache-dir or ${CACHE_ENV}")
    cache = BuildingBlockCache(cfg.cache_dir)
    if args.action == "clear":
        print(f"removed {cache.clear()} entries")
        return EXIT_OK
    rows = [{"key": e.key, "N": e.minimum.n_particles, "e_infinity": e.minimum.e_infinity,
             "v0": e.spectrum.v0} for e in cache.entries()]
    emit(rows, cfg, f"{len(rows)} cached entries in {cfg.cache_dir}")
    return EXIT_OK


def _cache(cfg: RunConfig):
    return BuildingBlockCache(cfg.cache_dir) if cfg.cache_dir else None


# --------------------------------------------------------------------------
# parser


def create_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("system")
    g.add_argument("--model", choices=sorted(_MODEL_FIELDS), default=None,
                   help="interaction: ideal, harmonic (needs --lambda), unitary (tuned well, --r), "
                        "well (explicit --depth and --r)")
    g.add_argument("--n", help="particle number, spins balanced with the odd one up; "
                               "sweep also takes ranges such as 6..30")
    g.add_argument("--n-up", type=int)
    g.add_argument("--n-down", type=int)
    g.add_argument("--lambda", dest="coupling", type=float, help="harmonic pair coupling")
    g.add_argument("--r", type=float, help="well radius in a_ho (default 0.01)")
    g.add_argument("--depth", type=float, help="well depth in hbar*omega_ho (model 'well')")
    o = common.add_argument_group("output")
    o.add_argument("--hw", type=float, help="value of hbar*omega_ho to rescale energies")
    o.add_argument("--format", choices=["text", "csv", "json"], default=None)
    o.add_argument("--output", help="write the table here instead of stdout")
    o.add_argument("--config", help="flat key = value file; flags override it")
    o.add_argument("--cache-dir", help=f"building-block cache directory (or ${CACHE_ENV})")
    o.add_argument("--oracle-check", action="store_true",
                   help="validate the reduced eigensolve against the dense one")
    o.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(
        prog="sptfermi",
        description="Harmonic-order energies of trapped two-component fermions "
                    "by symmetry-invariant dimensional perturbation theory.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__.split("\n\n", 2)[2] + """
examples:
  sptfermi energy --model ideal --n 6
  sptfermi modes --model ideal --n 10
  sptfermi sweep --model unitary --r 0.01 --n 6..30 --compare refs.csv
  sptfermi extrapolate --model unitary --n 6 --r-list 0.08,0.04,0.02
""")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("tune", parents=[common], help="depth and b putting the well at unitarity")
    sub.add_parser("minimize", parents=[common], help="symmetric large-D minimum")
    sub.add_parser("modes", parents=[common], help="five normal-mode frequencies, multiplicities, v0")
    p = sub.add_parser("energy", parents=[common], help="harmonic-order energy for one N")
    p.add_argument("--reference", choices=["fermion", "boson"], default=None)
    p = sub.add_parser("sweep", parents=[common], help="energies over a range of N")
    p.add_argument("--n-range", help="e.g. 6..30, 6..30:2 or 4,6,8")
    p.add_argument("--reference", choices=["fermion", "boson"], default=None)
    p.add_argument("--compare", help="reference CSV (columns N, E_ref, sigma, source)")
    p.add_argument("--series", help="prefix for two-column E(N) and dE(N) plot files")
    p = sub.add_parser("spectrum", parents=[common], help="excited levels up to --e-max")
    p.add_argument("--e-max", type=float)
    p = sub.add_parser("partition", parents=[common], help="Z(beta) from the enumerated spectrum")
    p.add_argument("--e-max", type=float)
    p.add_argument("--beta", help="comma-separated inverse temperatures (1/hbar*omega_ho)")
    p = sub.add_parser("extrapolate", parents=[common], help="fit E(R) to zero range")
    p.add_argument("--r-list", help="comma-separated well radii")
    p = sub.add_parser("compare", parents=[common], help="compare a saved sweep with references")
    p.add_argument("--table", help="sweep output (csv or json) with columns N and E")
    p.add_argument("--refs", help="reference CSV")
    p = sub.add_parser("cache", parents=[common], help="list or clear the building-block cache")
    p.add_argument("action", choices=["list", "clear"])
    return parser


COMMANDS = {"tune": cmd_tune, "minimize": cmd_minimize, "modes": cmd_modes, "energy": cmd_energy,
            "sweep": cmd_sweep, "spectrum": cmd_spectrum, "partition": cmd_partition,
            "extrapolate": cmd_extrapolate, "compare": cmd_compare, "cache": cmd_cache}


def dispatch(argv=None) -> int:
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = build_run_config(args)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"error [config]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PipelineError as exc:
        print(f"error {exc}", file=sys.stderr)
        if exc.stage == "oracle-check":
            return EXIT_ORACLE
        return EXIT_STAGE
    except OSError as exc:
        print(f"error [io]: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return EXIT_STAGE


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
