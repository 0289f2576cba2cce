"""
Command-line surface: `aperiodica <command> [flags]`.

JSON artefacts carry the config hash next to the exact values; CSV series and
point-set files are plain text. Exit status is 0 on success (a search that
finds nothing is a result), 1 for bad configuration and 2 when a checked
invariant fails.
"""
import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

from aperiodica import __version__
from aperiodica.config import RunConfig
from aperiodica.discrepancy import discrepancy_report, van_hove_check
from aperiodica.errors import (
    AperiodicaError,
    ConfigError,
    ConfigValidationError,
    InternalInvariantError,
    NotRepetitiveError,
)
from aperiodica.hullbuilder import TowerBudget, build_tower, distinguish, emit_hull_element, load_tower, verify_tower
from aperiodica.matcher import MatchInstance, bottleneck_match, non_bd_ratio
from aperiodica.model import Record
from aperiodica.pointsets import build_source, density, format_points, read_points, write_points
from aperiodica.scalar import QuadNum, format_scalar
from aperiodica.search import find_deviant, find_shift_robust_deviant, repetitivity_radius
from aperiodica.suites import run_all
from aperiodica.utils import logger

Command = Callable[[RunConfig], int]

TOWER_FLAGS = ("window_length", "growth", "max_window", "robust_candidates", "max_depth")


def _literal(value: Any) -> str:
    return format_scalar(value) if isinstance(value, QuadNum) else repr(float(value))


def _emit(text: str, path: Optional[Path]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)
        logger.info(f"wrote {path}")


def _emit_json(cfg: RunConfig, record: Optional[Record], path: Optional[Path] = None, **extra: Any) -> None:
    """Write a record as sorted JSON with the command and config hash added at the top level."""
    payload: dict[str, Any] = json.loads(record.to_json()) if record is not None else {"result": None}
    payload.update(extra, command=cfg.command, config_hash=cfg.config_hash())
    _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", path or cfg.output)


def _emit_csv(cfg: RunConfig, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _emit(buffer.getvalue(), cfg.output)


def _single_region(cfg: RunConfig, flag: str) -> Any:
    if len(cfg.regions) != 1:
        raise ConfigError(f"{cfg.command} needs exactly one {flag}")
    return cfg.regions[0]


def _window(cfg: RunConfig) -> Any:
    if cfg.window is None:
        raise ConfigError(f"{cfg.command} needs --window")
    return cfg.window


def _first_c(cfg: RunConfig) -> QuadNum:
    if not cfg.c_values:
        raise ConfigError(f"{cfg.command} needs --c")
    return cfg.c_values[0]


def cmd_generate(cfg: RunConfig) -> int:
    S = build_source(cfg.source)
    points = S.enumerate(_window(cfg))
    logger.info(f"{S.spec}: {len(points)} points in {cfg.window}")
    if cfg.output is None:
        sys.stdout.write(format_points(points, S.spec, S.dimension))
    else:
        write_points(cfg.output, points, S.spec, S.dimension)
    return 0


def cmd_density(cfg: RunConfig) -> int:
    S = build_source(cfg.source)
    _emit_json(cfg, density(S, cfg.family_regions(), cfg.van_hove_threshold))
    return 0


def cmd_discrepancy(cfg: RunConfig) -> int:
    S = build_source(cfg.source)
    _emit_json(cfg, discrepancy_report(S, cfg.resolve_rho(S), _single_region(cfg, "--region")))
    return 0


def cmd_vanhove(cfg: RunConfig) -> int:
    diagnostics = van_hove_check(cfg.family_regions(), cfg.eps, cfg.van_hove_threshold)
    rows = [
        (i, format_scalar(eps), repr(ratio))
        for eps, ratios in zip(cfg.eps, diagnostics.ratios)
        for i, ratio in enumerate(ratios, start=1)
    ]
    _emit_csv(cfg, ("i", "eps", "ratio"), rows)
    logger.info(f"van Hove check {'passed' if diagnostics.passed else 'failed'}: {diagnostics.failure or ''}")
    return 0


def cmd_deviant(cfg: RunConfig) -> int:
    S = build_source(cfg.source)
    rho, c, window = cfg.resolve_rho(S), _first_c(cfg), _window(cfg)
    if cfg.ell is not None:
        found = find_shift_robust_deviant(S, rho, c, cfg.ell, window, cfg.budget, method=cfg.method)
    else:
        found = find_deviant(S, rho, c, window, cfg.budget)
    _emit_json(cfg, found)
    return 0


def cmd_reprad(cfg: RunConfig) -> int:
    S = build_source(cfg.source)
    try:
        estimate = repetitivity_radius(S, _single_region(cfg, "--patch"), _window(cfg))
    except NotRepetitiveError as e:
        _emit_json(cfg, None, reason=str(e))
        return 0
    _emit_json(cfg, estimate)
    return 0


def cmd_match(cfg: RunConfig) -> int:
    if len(cfg.inputs) != 2:
        raise ConfigError("match needs --left and --right")
    left, _ = read_points(cfg.inputs[0])
    right, _ = read_points(cfg.inputs[1])
    _emit_json(cfg, bottleneck_match(MatchInstance(left=left, right=right), t_max=cfg.t_max))
    return 0


def cmd_nonbd(cfg: RunConfig) -> int:
    if cfg.source_b is None:
        raise ConfigError("nonbd needs --s2")
    S1, S2 = build_source(cfg.source), build_source(cfg.source_b)
    evidence = non_bd_ratio(S1, S2, cfg.family_regions(), cfg.van_hove_threshold)
    rows = [(i, _literal(ratio), f"{float(ratio):.6f}", evidence.verdict) for i, ratio in evidence.ratios]
    _emit_csv(cfg, ("i", "ratio", "ratio_approx", "verdict"), rows)
    return 0


def cmd_hull(cfg: RunConfig) -> int:
    S = build_source(cfg.source)
    tower = build_tower(S, cfg.word, cfg.c_values, cfg.tower, cfg.resolve_rho(S))
    checks = verify_tower(tower, S)
    extra: dict[str, Any] = {"checks": [json.loads(check.to_json()) for check in checks]}
    transcript = cfg.output.with_suffix(".json") if cfg.output is not None else None
    if tower.complete:
        element = emit_hull_element(tower)
        extra["element"] = json.loads(element.to_json())
        if cfg.output is not None:
            write_points(cfg.output, [(p,) for p in element.points], f"hull:{S.spec}:{cfg.word}", 1)
    _emit_json(cfg, tower, transcript, **extra)
    failed = [check.name for check in checks if not check.passed]
    if failed:
        raise InternalInvariantError(f"tower {cfg.word} fails its checks: {', '.join(failed)}")
    return 0


def cmd_distinguish(cfg: RunConfig) -> int:
    if len(cfg.inputs) != 2:
        raise ConfigError("distinguish needs --tower-a and --tower-b")
    _emit_json(cfg, distinguish(load_tower(cfg.inputs[0]), load_tower(cfg.inputs[1]), cfg.level))
    return 0


def cmd_verify_lemmas(cfg: RunConfig) -> int:
    results = run_all(cfg.seed, cfg.scale, cfg.workers)
    rows = [(r.name, r.cases, r.failures, "pass" if r.passed else "FAIL") for r in results]
    if cfg.output is not None:
        _emit_csv(cfg, ("suite", "cases", "failures", "result"), rows)
    else:
        for name, cases, failures, result in rows:
            sys.stdout.write(f"{name:<20}{cases:>8}{failures:>10}  {result}\n")
    failed = [r for r in results if not r.passed]
    if failed:
        raise InternalInvariantError("; ".join(f"{r.name}: {r.detail}" for r in failed))
    return 0


COMMANDS: dict[str, Command] = {
    "generate": cmd_generate,
    "density": cmd_density,
    "discrepancy": cmd_discrepancy,
    "vanhove": cmd_vanhove,
    "deviant": cmd_deviant,
    "reprad": cmd_reprad,
    "match": cmd_match,
    "nonbd": cmd_nonbd,
    "hull": cmd_hull,
    "distinguish": cmd_distinguish,
    "verify-lemmas": cmd_verify_lemmas,
}


def _list(text: str) -> list[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", type=Path, help="artefact path, stdout when omitted")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(prog="aperiodica", description="Bounded-distance analysis of Delone sets.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help: str) -> argparse.ArgumentParser:
        return commands.add_parser(name, parents=[common], help=help)

    def source(p: argparse.ArgumentParser, flag: str = "--source", dest: str = "source") -> None:
        p.add_argument(flag, dest=dest, help="source spec, e.g. fib, halffib, latticeZ, exampleL, sub")

    def family(p: argparse.ArgumentParser) -> None:
        p.add_argument("--family", help="region family: centered, Qi or fibonacci")
        p.add_argument("--max-i", dest="max_i", type=int, help="number of regions of the family")
        p.add_argument("--van-hove-threshold", dest="van_hove_threshold", type=float)

    def rho(p: argparse.ArgumentParser) -> None:
        p.add_argument("--rho", help="exact density literal or auto")

    p = add("generate", "enumerate a point set inside a window")
    source(p)
    p.add_argument("--window", required=True)

    p = add("density", "density along a region family")
    source(p)
    family(p)

    p = add("discrepancy", "discrepancy report of one region")
    source(p)
    rho(p)
    p.add_argument("--region", dest="regions", action="append", required=True)

    p = add("vanhove", "tube ratios of a region family")
    family(p)
    p.add_argument("--eps", type=_list, help="comma-separated tube radii")

    p = add("deviant", "find a c-deviant region")
    source(p)
    rho(p)
    p.add_argument("--c", dest="c_values", type=_list, required=True)
    p.add_argument("--window", required=True)
    p.add_argument("--robust-ell", dest="ell", help="require deviance under every shift of norm at most ell")
    p.add_argument("--method", choices=("lemma", "scan"))
    p.add_argument("--budget", type=int, help="midpoints scanned per window component")

    p = add("reprad", "repetitivity radius of a patch")
    source(p)
    p.add_argument("--patch", dest="regions", action="append", required=True)
    p.add_argument("--window", required=True)

    p = add("match", "bottleneck matching of two point-set files")
    p.add_argument("--left", type=Path, required=True)
    p.add_argument("--right", type=Path, required=True)
    p.add_argument("--t-max", dest="t_max", help="report a Hall witness when the optimum exceeds this")

    p = add("nonbd", "count-difference ratios of two sources")
    source(p, "--s1")
    source(p, "--s2", "source_b")
    family(p)

    p = add("hull", "build a patch tower and emit its hull element window")
    source(p)
    rho(p)
    p.add_argument("--word", required=True, help="letters over D and N")
    p.add_argument("--c", dest="c_values", type=_list, required=True)
    p.add_argument("--budget", type=int, help="midpoints scanned per window component")
    p.add_argument("--method", choices=("lemma", "scan"))
    p.add_argument("--window-length", dest="window_length", type=int)
    p.add_argument("--growth", type=int)
    p.add_argument("--max-window", dest="max_window", type=int, help="largest scan window length")
    p.add_argument("--robust-candidates", dest="robust_candidates", type=int)
    p.add_argument("--max-depth", dest="max_depth", type=int)

    p = add("distinguish", "compare two towers at a level where their words differ")
    p.add_argument("--tower-a", dest="tower_a", type=Path, required=True)
    p.add_argument("--tower-b", dest="tower_b", type=Path, required=True)
    p.add_argument("--level", type=int, required=True)

    p = add("verify-lemmas", "run the randomized inequality suites")
    p.add_argument("--scale", type=float, help="suite size factor")
    p.add_argument("--seed", type=int, help="random seed of the sampled cases")
    p.add_argument("--workers", type=int, help="worker processes (env APERIODICA_WORKERS)")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Flags that were given override the environment and the defaults."""
    values = {k: v for k, v in vars(args).items() if v is not None and k != "verbose"}
    tower = {k: values.pop(k) for k in list(values) if k in TOWER_FLAGS}
    if "budget" in values and values["command"] == "hull":
        tower["scan_budget"] = values.pop("budget")
    if "method" in values and values["command"] == "hull":
        tower["robust_method"] = values.pop("method")
    inputs = [values.pop(k) for k in ("left", "right", "tower_a", "tower_b") if k in values]
    if inputs:
        values["inputs"] = inputs
    if tower:
        values["tower"] = TowerBudget(**tower)
    return RunConfig(**values)


def configure_logging(verbose: bool) -> None:
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if verbose else "INFO")


def run(command: str, cfg: RunConfig) -> int:
    return COMMANDS[command](cfg)


def _fail(kind: str, error: Exception, status: int) -> int:
    logger.error(f"{kind}: {error}")
    sys.stderr.write(json.dumps({"error": type(error).__name__, "kind": kind, "message": str(error)}) + "\n")
    return status


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        cfg = config_from_args(args)
    except ConfigValidationError as e:
        return _fail("config", e, 1)
    try:
        return run(cfg.command, cfg)
    except InternalInvariantError as e:
        return _fail("invariant", e, 2)
    except (ConfigValidationError, AperiodicaError) as e:
        return _fail("config", e, 1)
