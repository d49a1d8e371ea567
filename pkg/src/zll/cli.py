"""Command-line front end.

Subcommands::

    zll zeta 14.1347251417
    zll integrate 0 100
    zll j1 10000
    zll ladder phi1 10000
    zll ladder tower 10000 3
    zll crossings 1000 --out crossings.csv
    zll areas 1000
    zll law lemma2 --rho 10000
    zll law segment --x 1 --N 2 --tau 2500 5000 10000 --format csv --out seg.csv
    zll cache info | zll cache clear

Settings come from ``--config FILE`` (flat ``key=value`` lines) and are
overridden by flags.  The J cache lives at ``--cache``, else ``$ZLL_CACHE``,
else ``./zll_cache.csv``.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 cache
fingerprint conflict.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import laws
from .ladder import (
    DEFAULT_DELTA_GRID,
    LadderConstants,
    LadderError,
    build_tower,
    c0_extrapolation,
    phi1,
    tower_asymptotic_report,
)
from .oscillation import DEFAULT_RESOLUTION, build_partition, minus_set_bound_check, signed_areas
from .quadrature import (
    CacheError,
    CacheFingerprintError,
    IntegralCache,
    Integrator,
    QuadratureError,
    QuadratureSpec,
    cache_load,
    cache_save,
    fingerprint,
)
from .reports import FunctionalReport, emit_report
from .roots import BracketError
from .special_functions import DomainError, EvaluatorConfig, hardy_Z

log = logging.getLogger("zll")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_CACHE = 0, 1, 2, 3

LAW_NAMES = (
    "lemma1",
    "lemma2",
    "increment",
    "scaled",
    "fermat",
    "conservation",
    "zero-limit",
    "segment",
    "formula41",
    "localized",
    "tower-asymptotics",
    "estimate-c0",
)

# config key -> (owner, field, type)
CONFIG_KEYS = {
    "rs_correction_terms": ("evaluator", int),
    "method_switch_t": ("evaluator", float),
    "em_terms": ("evaluator", int),
    "target_abs_error": ("evaluator", float),
    "abs_tol": ("quadrature", float),
    "panel_rule": ("quadrature", int),
    "refinement_limit": ("quadrature", int),
    "c": ("constants", float),
    "ln2pi": ("constants", float),
    "c0": ("constants", float),
    "root_tol": ("constants", float),
    "cache": ("run", str),
    "output_dir": ("run", str),
    "plot": ("run", lambda s: s.strip().lower() in ("1", "true", "yes", "on")),
    "resolution": ("run", float),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


@dataclass
class RunConfig:
    evaluator: EvaluatorConfig = field(default_factory=EvaluatorConfig)
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    constants: LadderConstants = field(default_factory=LadderConstants)
    cache_path: Path = Path("zll_cache.csv")
    output_dir: Path = Path(".")
    plot: bool = False
    resolution: float = DEFAULT_RESOLUTION


def read_config_file(path) -> dict:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def build_run_config(file_values: dict, flag_values: dict) -> RunConfig:
    """Merge config-file strings with CLI flag values (flags win)."""
    merged = {}
    for key, raw in file_values.items():
        merged[key] = CONFIG_KEYS[key][1](raw)
    for key, value in flag_values.items():
        if value is not None:
            merged[key] = value
    groups = {"evaluator": {}, "quadrature": {}, "constants": {}, "run": {}}
    for key, value in merged.items():
        groups[CONFIG_KEYS[key][0]][key] = value
    try:
        cfg = RunConfig(
            evaluator=EvaluatorConfig(**groups["evaluator"]),
            quadrature=QuadratureSpec(**groups["quadrature"]),
            constants=LadderConstants(**groups["constants"]),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    run = groups["run"]
    env_cache = os.environ.get("ZLL_CACHE")
    if "cache" in run:
        cfg.cache_path = Path(run["cache"])
    elif env_cache:
        cfg.cache_path = Path(env_cache)
    if "output_dir" in run:
        cfg.output_dir = Path(run["output_dir"])
    cfg.plot = bool(run.get("plot", False))
    cfg.resolution = float(run.get("resolution", DEFAULT_RESOLUTION))
    return cfg


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _print_pairs(pairs, out):
    for key, value in pairs:
        if isinstance(value, float):
            value = _fmt(value)
        print(f"{key}: {value}", file=out)


def create_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key=value settings file")
    common.add_argument("--cache", help="J checkpoint cache path (default $ZLL_CACHE or ./zll_cache.csv)")
    common.add_argument("--no-cache", action="store_true", help="do not read or write the cache file")
    common.add_argument("--output-dir", dest="output_dir", help="directory for reports and plots")
    common.add_argument("--plot", action="store_const", const=True, default=None, help="also write an SVG plot")
    common.add_argument("--c0", type=float, help="Titchmarsh-Kober-Atkinson constant")
    common.add_argument("--abs-tol", dest="abs_tol", type=float, help="quadrature tolerance per unit length")
    common.add_argument("--panel-rule", dest="panel_rule", type=int, help="Gauss-Legendre nodes per panel")
    common.add_argument("--rs-terms", dest="rs_correction_terms", type=int, help="Riemann-Siegel terms C0..Ck")
    common.add_argument("--switch-t", dest="method_switch_t", type=float, help="Euler-Maclaurin below this t")
    common.add_argument("--root-tol", dest="root_tol", type=float, help="relative root tolerance")
    common.add_argument("--resolution", type=float, help="crossing scan resolution")
    common.add_argument("--override-fingerprint", action="store_true",
                        help="load a cache whose fingerprint differs (entries are discarded)")
    common.add_argument("-q", "--quiet", action="store_true", help="no progress on stderr")

    parser = _Parser(prog="zll", description="Hardy Z, J(T), J1(T), Jacob's ladders and their limit laws")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("zeta", parents=[common], help="Z(t) and |zeta(1/2+it)|^2")
    p.add_argument("t", type=float)

    p = sub.add_parser("integrate", parents=[common], help="integral of Z^2 over [a, b]")
    p.add_argument("a", type=float)
    p.add_argument("b", type=float)

    p = sub.add_parser("j1", parents=[common], help="J1(T) = integral of log t - Z^2 over (0, T]")
    p.add_argument("T", type=float)

    p = sub.add_parser("ladder", parents=[common], help="phi1 and reverse-iteration towers")
    lsub = p.add_subparsers(dest="ladder_command", parser_class=_Parser)
    q = lsub.add_parser("phi1", parents=[common])
    q.add_argument("T", type=float)
    q = lsub.add_parser("tower", parents=[common])
    q.add_argument("T", type=float)
    q.add_argument("k", type=int)

    p = sub.add_parser("crossings", parents=[common], help="crossings of log t and Z^2 on (0, T]")
    p.add_argument("T", type=float)
    p.add_argument("--out", help="crossing CSV (column t)")
    p.add_argument("--partition-out", dest="partition_out", help="partition CSV (a,b,sign)")

    p = sub.add_parser("areas", parents=[common], help="signed areas over (0, T]")
    p.add_argument("T", type=float)

    p = sub.add_parser("law", parents=[common], help="residuals and limit functionals")
    p.add_argument("name", choices=LAW_NAMES)
    p.add_argument("--T", dest="T_grid", type=float, nargs="+")
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--rho", type=float, nargs="+")
    p.add_argument("--x", type=float, default=1.0)
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--tau", type=float, nargs="+")
    p.add_argument("--fermat", type=int, nargs=4, metavar=("X", "Y", "Z", "N"))
    p.add_argument("--epsilon", type=float, default=0.3)
    p.add_argument("--n-max", dest="n_max", type=int, default=3)
    p.add_argument("--z-max", dest="z_max", type=int, default=9)
    p.add_argument("--delta", type=float, nargs="+", default=list(DEFAULT_DELTA_GRID))
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="report file (default: stdout)")

    p = sub.add_parser("cache", parents=[common], help="inspect or clear the J cache")
    p.add_argument("action", choices=("info", "clear"))
    return parser


def _flag_values(args) -> dict:
    keys = ("cache", "output_dir", "plot", "c0", "abs_tol", "panel_rule", "rs_correction_terms",
            "method_switch_t", "root_tol", "resolution")
    return {k: getattr(args, k, None) for k in keys}


@contextlib.contextmanager
def _cache_session(run: RunConfig, args):
    """Yield an Integrator bound to the on-disk cache; save it back on success."""
    if args.no_cache:
        yield Integrator(run.evaluator, run.quadrature)
        return
    path = run.cache_path
    path.parent.mkdir(parents=True, exist_ok=True)
    expected = fingerprint(run.evaluator, run.quadrature, 1.0)
    cache = IntegralCache.empty(run.evaluator, run.quadrature)
    if path.exists():
        loaded = cache_load(path, expected, override=args.override_fingerprint)
        if loaded.fingerprint == expected:
            cache = loaded
        else:
            log.warning("discarding cache entries produced under fingerprint %s", loaded.fingerprint)
    size = len(cache.values)
    integ = Integrator(run.evaluator, run.quadrature, cache)
    yield integ
    if len(cache.values) != size:
        # cache_save holds the advisory lock while replacing the file
        cache_save(cache, path)


def _cmd_zeta(args, run, out):
    s = hardy_Z(args.t, run.evaluator)
    _print_pairs(
        [("t", s.t), ("theta", s.theta), ("z", s.z), ("zeta_sq", s.zeta_sq), ("err_bound", s.err_bound),
         ("accuracy_warning", str(s.accuracy_warning).lower())],
        out,
    )


def _cmd_integrate(args, run, out):
    with _cache_session(run, args) as integ:
        value = integ.integrate(args.a, args.b)
        _print_pairs([("a", args.a), ("b", args.b), ("integral", value),
                      ("cache_fingerprint", integ.fingerprint)], out)


def _cmd_j1(args, run, out):
    if not args.T > 0:
        raise UsageError("T must be positive")
    with _cache_session(run, args) as integ:
        J = integ.J_scalar(args.T)
        J1 = float(integ.J1(args.T)[0])
        _print_pairs([("T", args.T), ("J", J), ("J1", J1), ("J1_over_T", J1 / args.T),
                      ("cache_fingerprint", integ.fingerprint)], out)


def _cmd_ladder(args, run, out):
    if args.ladder_command is None:
        raise UsageError("ladder needs 'phi1' or 'tower'")
    with _cache_session(run, args) as integ:
        consts = run.constants
        if args.ladder_command == "phi1":
            value = phi1(args.T, consts, integ)
            _print_pairs([("T", args.T), ("phi1", value), ("c0", consts.c0)], out)
        else:
            tower = build_tower(args.T, args.k, consts, integ)
            _print_pairs([("T", args.T), ("k", args.k), ("c0", consts.c0)], out)
            for r, level in enumerate(tower.levels):
                _print_pairs([(f"level_{r}", level)], out)


def _cmd_crossings(args, run, out):
    part = build_partition(args.T, run.evaluator, run.resolution)
    if args.out:
        _write_rows(args.out, ["t"], [[_fmt(t)] for t in part.crossings])
    else:
        print("t", file=out)
        for t in part.crossings:
            print(_fmt(t), file=out)
    if args.partition_out:
        _write_rows(args.partition_out, ["a", "b", "sign"],
                    [[_fmt(a), _fmt(b), s] for a, b, s in part.segments])
    for t in part.tangencies:
        log.warning("near-tangency of log t and Z^2 at t=%s (not counted as a crossing)", _fmt(t))
    if run.plot:
        _plot(part, run, f"partition_{args.T:g}.svg")


def _cmd_areas(args, run, out):
    part = build_partition(args.T, run.evaluator, run.resolution)
    with _cache_session(run, args) as integ:
        plus, minus = signed_areas(part, integ)
        J1 = float(integ.J1(args.T)[0])
    audit = minus_set_bound_check(part, run.evaluator)
    _print_pairs(
        [("T", args.T), ("area_plus", plus), ("area_minus", minus), ("difference", plus - minus),
         ("J1", J1), ("crossings", len(part.crossings)), ("minus_audit_passed", str(audit.passed).lower())],
        out,
    )


def _need(value, flag):
    if value is None:
        raise UsageError(f"this law needs {flag}")
    return value


def _law_reports(args, run, integ) -> list:
    consts = run.constants
    name = args.name
    if name == "lemma1":
        return [laws.lemma1_report(_need(args.T_grid, "--T"), args.r, consts, integ)]
    if name == "lemma2":
        return [laws.lemma2_report(_need(args.rho, "--rho"), consts, integ)]
    if name == "increment":
        return [laws.increment_report(_need(args.T_grid, "--T"), args.r, consts, integ)]
    if name == "scaled":
        return [laws.scaled_report(args.x, _need(args.tau, "--tau"), consts, integ)]
    if name == "fermat":
        fr = laws.FermatRational(*_need(args.fermat, "--fermat X Y Z N"))
        return [laws.fermat_report(fr, _need(args.tau, "--tau"), consts, integ)]
    if name == "conservation":
        return [laws.conservation_report(_need(args.T_grid, "--T"), args.r, consts, integ, run.resolution)]
    if name == "zero-limit":
        return [laws.zero_limit_report(_need(args.T_grid, "--T"), args.r, consts, integ, run.resolution)]
    if name == "segment":
        return [laws.segment_report(args.x, args.N, _need(args.tau, "--tau"), consts, integ)]
    if name == "formula41":
        return [laws.formula41_report(args.x, _need(args.tau, "--tau"), consts, integ)]
    if name == "localized":
        tau = _need(args.tau, "--tau")
        if len(tau) != 1:
            raise UsageError("localized takes a single --tau")
        return [laws.localized_scan(args.epsilon, args.N, args.n_max, args.z_max, tau[0], consts, integ)]
    if name == "tower-asymptotics":
        return tower_asymptotic_report(_need(args.T_grid, "--T"), args.k, consts, integ)
    if name == "estimate-c0":
        est = c0_extrapolation(sorted(args.delta, reverse=True), consts)
        if est.low_confidence:
            log.warning("c0 extrapolation spread %.1f%% exceeds 10%%", 100 * est.spread)
        rep = FunctionalReport(
            name="estimate-c0",
            grid=list(reversed(est.deltas)),
            values=list(reversed(est.remainders)),
            target=est.value,
            constants=consts.as_dict(),
            resolution_achieved=est.spread * abs(est.value),
            cache_fingerprint=integ.fingerprint,
            metadata={"c0_estimate": est.value, "spread": est.spread,
                      "low_confidence": est.low_confidence,
                      "laplace_values": list(reversed(est.laplace_values))},
        )
        return [rep]
    raise UsageError(f"unknown law {name!r}")


def _cmd_law(args, run, out):
    with _cache_session(run, args) as integ:
        reports = _law_reports(args, run, integ)
    for rep in reports:
        if args.out:
            path = Path(args.out)
            if len(reports) > 1:
                path = path.with_name(f"{path.stem}-{rep.name}{path.suffix}")
            if not path.is_absolute():
                path = run.output_dir / path
            emit_report(rep, args.format, path)
        else:
            out.write(emit_report(rep, args.format))
        if run.plot:
            _plot(rep, run, f"{rep.name}.svg")


def _cmd_cache(args, run, out):
    path = run.cache_path
    if args.action == "clear":
        for p in (path, Path(str(path) + ".lock")):
            if p.exists():
                p.unlink()
        _print_pairs([("cache", str(path)), ("checkpoints", 0)], out)
        return
    if path.exists():
        cache = cache_load(path)
        expected = fingerprint(run.evaluator, run.quadrature, cache.grid_step)
        _print_pairs(
            [("cache", str(path)), ("checkpoints", len(cache.values)), ("upper", cache.upper),
             ("fingerprint", cache.fingerprint), ("matches_config", str(cache.fingerprint == expected).lower())],
            out,
        )
    else:
        _print_pairs([("cache", str(path)), ("checkpoints", 0)], out)


def _write_rows(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    Path(path).write_text(buf.getvalue())


def _plot(obj, run, filename):
    from .plots import emit_plot

    run.output_dir.mkdir(parents=True, exist_ok=True)
    emit_plot(obj, run.output_dir / filename, run.evaluator)


COMMANDS = {
    "zeta": _cmd_zeta,
    "integrate": _cmd_integrate,
    "j1": _cmd_j1,
    "ladder": _cmd_ladder,
    "crossings": _cmd_crossings,
    "areas": _cmd_areas,
    "law": _cmd_law,
    "cache": _cmd_cache,
}


def _configure_logging(quiet):
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(logging.WARNING if quiet else logging.INFO)
    log.propagate = False


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        _configure_logging(args.quiet)
        file_values = read_config_file(args.config) if args.config else {}
        run = build_run_config(file_values, _flag_values(args))
        COMMANDS[args.command](args, run, out)
        return EXIT_OK
    except (UsageError, DomainError) as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except CacheFingerprintError as exc:
        print(f"zll: cache conflict: {exc}", file=sys.stderr)
        return EXIT_CACHE
    except CacheError as exc:
        print(f"zll: cache error: {exc}", file=sys.stderr)
        return EXIT_CACHE
    except (QuadratureError, LadderError, BracketError, ValueError) as exc:
        print(f"zll: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"zll: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
