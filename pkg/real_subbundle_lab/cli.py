"""
Command-line interface for the real subbundle lab.

Usage:
    real-subbundle-lab classify --curve config/curves/c4.json
    real-subbundle-lab survey --curve config/curves/c4.json --lambda 111 --trials 10000 --seed 7
    real-subbundle-lab --tol equality=1e-10 orbit --curve c1.json --divisor d.json

Exit codes: 0 on success, 1 on error, 2 when a survey verdict is a violation.

Author: Ruslan Magana Vsevolodovna
Website: ruslanmv.com
License: Apache 2.0
"""

import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Literal, Optional, Sequence

import click
import numpy as np
import typer
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from rich.console import Console

from config.log import configure_logging
from config.settings import LabSettings, load_settings, use_settings
from real_subbundle_lab.atiyah import analyze
from real_subbundle_lab.curve import (
    CurveSpec,
    RealHyperellipticCurve,
    build_curve,
    classify,
    fixed_and_antireal_components,
)
from real_subbundle_lab.divisors import LineBundleTopType, parse_divisor
from real_subbundle_lab.equivalence import two_torsion
from real_subbundle_lab.errors import LabError
from real_subbundle_lab.newstead import build_pencil, survey_forms
from real_subbundle_lab.reports import dumps, emit, run_meta, survey_csv
from real_subbundle_lab.subbundles import (
    lange_narasimhan_table,
    max_distinct_over_configs,
    real_fiber_configs,
    relative_types,
)
from real_subbundle_lab.survey import (
    RecipeName,
    run_battery,
    run_survey,
    trichotomy_verdict,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2

err_console = Console(stderr=True)

app = typer.Typer(
    name="real-subbundle-lab",
    help="Verify real subbundle counts on real genus-2 hyperelliptic curves.",
    add_completion=False,
    no_args_is_help=True,
)


class RunConfig(BaseModel):
    """Run configuration file; command-line flags take precedence."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    curve: Optional[Path] = None
    command: Optional[str] = None
    seed: int = Field(default=0, ge=0, le=2**64 - 1)
    trials: int = Field(default=1000, ge=1)
    min_trials: Optional[int] = Field(default=None, ge=1)
    lambda_bits: Optional[str] = Field(default=None, alias="lambda")
    recipe: Optional[RecipeName] = None
    tolerances: Dict[str, float] = Field(default_factory=dict)
    threads: Optional[int] = Field(default=None, ge=1)
    out: Optional[Path] = None
    format: Literal["json", "csv"] = "json"

    @classmethod
    def load(cls, path: Path) -> "RunConfig":
        return cls.model_validate_json(path.read_text(encoding="utf-8"))


@dataclass
class RunState:
    config: RunConfig
    settings: LabSettings
    equality_override: Optional[float]


def parse_tolerance_overrides(items: Sequence[str]) -> Dict[str, float]:
    """
    Parse ``name=value`` pairs; a bare number sets the equality tolerance.

    Raises:
        ValueError: On a malformed item
    """
    overrides: Dict[str, float] = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep:
            name, value = "equality", item
        overrides[name.strip()] = float(value)
    return overrides


def _error(message: str) -> None:
    err_console.print(f"❌ {message}", markup=False, highlight=False, soft_wrap=True)


def _state(ctx: typer.Context) -> RunState:
    return ctx.obj


def _load_curve(state: RunState, path: Optional[Path]) -> RealHyperellipticCurve:
    path = path or state.config.curve
    if path is None:
        raise click.UsageError("--curve is required")
    spec = CurveSpec.model_validate_json(Path(path).read_text(encoding="utf-8"))
    tol = state.equality_override if state.equality_override is not None else spec.tol
    return build_curve(spec.coeffs, spec.lift_sign, tol)


def _meta(state: RunState, curve: Optional[RealHyperellipticCurve], seed: Optional[int]) -> Dict:
    return run_meta(curve, seed, state.settings.tolerances)


def _out(state: RunState, out: Optional[Path]) -> Optional[Path]:
    return out if out is not None else state.config.out


@app.callback()
def main_callback(
    ctx: typer.Context,
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging on stderr"),
    config: Optional[Path] = typer.Option(None, "--config", help="Run configuration JSON"),
    tol: List[str] = typer.Option(
        [], "--tol", help="Tolerance override name=value; a bare number sets equality"
    ),
) -> None:
    """Set up logging, settings and the run configuration."""
    configure_logging(logging.DEBUG if verbose else logging.WARNING)
    run_config = RunConfig.load(config) if config is not None else RunConfig()
    overrides = {**run_config.tolerances, **parse_tolerance_overrides(tol)}
    base = load_settings()
    updates: Dict[str, object] = {"tolerances": base.tolerances.with_overrides(overrides)}
    if run_config.threads is not None:
        updates["threads"] = run_config.threads
    if run_config.min_trials is not None:
        updates["min_trials"] = run_config.min_trials
    settings = LabSettings.model_validate({**base.model_dump(), **updates})
    use_settings(settings)
    ctx.obj = RunState(run_config, settings, overrides.get("equality"))


@app.command("classify")
def classify_command(
    ctx: typer.Context,
    curve: Optional[Path] = typer.Option(None, "--curve", help="Curve spec JSON"),
    out: Optional[Path] = typer.Option(None, "--out"),
) -> int:
    """Print the topological type (n, a, m)."""
    state = _state(ctx)
    c = _load_curve(state, curve)
    payload = {**classify(c).to_dict(), "meta": _meta(state, c, None)}
    emit(dumps(payload), _out(state, out))
    return EXIT_OK


@app.command("circles")
def circles_command(
    ctx: typer.Context,
    curve: Optional[Path] = typer.Option(None, "--curve"),
    out: Optional[Path] = typer.Option(None, "--out"),
) -> int:
    """Print fixed circles and anti-real components."""
    state = _state(ctx)
    c = _load_curve(state, curve)
    fixed, anti = fixed_and_antireal_components(c)
    payload = {
        "fixed_circles": [{"index": f.index, **f.support.to_dict()} for f in fixed],
        "anti_real": [{"index": a.index, **a.support.to_dict()} for a in anti],
        "roots": [[r.real, r.imag] for r in c.roots],
        "meta": _meta(state, c, None),
    }
    emit(dumps(payload), _out(state, out))
    return EXIT_OK


@app.command("torsion")
def torsion_command(
    ctx: typer.Context,
    curve: Optional[Path] = typer.Option(None, "--curve"),
    seed: Optional[int] = typer.Option(None, "--seed"),
    out: Optional[Path] = typer.Option(None, "--out"),
) -> int:
    """Print the 16 two-torsion classes with their reality flags."""
    state = _state(ctx)
    c = _load_curve(state, curve)
    seed = state.config.seed if seed is None else seed
    classes = two_torsion(c, np.random.default_rng(seed))
    payload = {
        "classes": [cls.to_dict() for cls in classes],
        "real_count": sum(1 for cls in classes if cls.is_real),
        "meta": _meta(state, c, seed),
    }
    emit(dumps(payload), _out(state, out))
    return EXIT_OK


@app.command("orbit")
def orbit_command(
    ctx: typer.Context,
    curve: Optional[Path] = typer.Option(None, "--curve"),
    divisor: Path = typer.Option(..., "--divisor", help="Divisor literal JSON"),
    out: Optional[Path] = typer.Option(None, "--out"),
) -> int:
    """Analyze the Atiyah orbit of a degree-3 divisor."""
    state = _state(ctx)
    c = _load_curve(state, curve)
    d = parse_divisor(c, json.loads(divisor.read_text(encoding="utf-8")))
    payload = {
        **analyze(d).to_dict(),
        "divisor": d.to_literal(),
        "meta": _meta(state, c, None),
    }
    emit(dumps(payload), _out(state, out))
    return EXIT_OK


@app.command("survey")
def survey_command(
    ctx: typer.Context,
    curve: Optional[Path] = typer.Option(None, "--curve"),
    lambda_bits: Optional[str] = typer.Option(None, "--lambda", help="Odd circles of the determinant, e.g. 100"),
    recipe: Optional[RecipeName] = typer.Option(None, "--recipe", help="Single recipe; default runs the battery"),
    trials: Optional[int] = typer.Option(None, "--trials", min=1),
    seed: Optional[int] = typer.Option(None, "--seed", min=0),
    min_trials: Optional[int] = typer.Option(None, "--min-trials", min=1),
    out: Optional[Path] = typer.Option(None, "--out"),
    fmt: Optional[str] = typer.Option(None, "--format", help="json or csv"),
) -> int:
    """Run the recipe battery (or one recipe) and the trichotomy verdict."""
    state = _state(ctx)
    cfg = state.config
    c = _load_curve(state, curve)
    bits = lambda_bits or cfg.lambda_bits
    if bits is None:
        raise click.UsageError("--lambda is required")
    lam = LineBundleTopType.from_bits(bits, degree=1)
    recipe = recipe or cfg.recipe
    trials = cfg.trials if trials is None else trials
    seed = cfg.seed if seed is None else seed
    fmt = fmt or cfg.format
    if fmt not in ("json", "csv"):
        raise click.UsageError(f"unknown format {fmt!r}")

    if recipe is None:
        results = run_battery(c, lam, trials, seed)
        verdict = trichotomy_verdict(classify(c), lam, results, min_trials)
    else:
        results = {recipe.value: run_survey(c, lam, recipe, trials, seed)}
        verdict = None

    if fmt == "csv":
        rows = [r.csv_row() for result in results.values() for r in result.records]
        meta = {**_meta(state, c, seed), "trials": trials, "lambda": lam.bits}
        emit(survey_csv(rows, meta), _out(state, out))
    else:
        payload = {
            "lambda": lam.bits,
            "curve_type": classify(c).to_dict(),
            "results": {name: result.to_dict() for name, result in results.items()},
            "verdict": verdict.to_dict() if verdict is not None else None,
            "meta": {**_meta(state, c, seed), "trials": trials},
        }
        emit(dumps(payload), _out(state, out))
    if verdict is not None and verdict.is_violation:
        _error(f"trichotomy violation: support {list(verdict.support)}")
        return EXIT_VIOLATION
    return EXIT_OK


@app.command("subbundle-types")
def subbundle_types_command(
    ctx: typer.Context,
    n: Optional[int] = typer.Option(None, "--n", min=1, max=3, help="Number of fixed circles"),
    lambda_bits: Optional[str] = typer.Option(None, "--lambda"),
    show_all: bool = typer.Option(False, "--all", help="Full table for n <= 3"),
    out: Optional[Path] = typer.Option(None, "--out"),
) -> int:
    """Print admissible real fiber configurations and relative subbundle types."""
    state = _state(ctx)
    if show_all:
        payload: Dict[str, object] = {"table": lange_narasimhan_table()}
    else:
        bits = lambda_bits or state.config.lambda_bits
        if n is None or bits is None:
            raise click.UsageError("give --n and --lambda, or --all")
        sig = LineBundleTopType.from_bits(bits, degree=1).odd_circles
        configs = real_fiber_configs(n, sig)
        payload = {
            "n": n,
            "lambda": bits,
            "assignments": [
                {"counts": list(a.counts(n)), **relative_types(n, sig, a).to_dict()}
                for a in configs
            ],
            "max_distinct": max_distinct_over_configs(n, sig),
        }
    payload["meta"] = _meta(state, None, None)
    emit(dumps(payload), _out(state, out))
    return EXIT_OK


@app.command("newstead")
def newstead_command(
    ctx: typer.Context,
    curve: Optional[Path] = typer.Option(None, "--curve"),
    count: Optional[int] = typer.Option(None, "--count", min=1, help="Points per form"),
    seed: Optional[int] = typer.Option(None, "--seed", min=0),
    out: Optional[Path] = typer.Option(None, "--out"),
) -> int:
    """Sample real points of every real form of the quadric pencil."""
    state = _state(ctx)
    c = _load_curve(state, curve)
    seed = state.config.seed if seed is None else seed
    count = state.settings.newstead_points if count is None else count
    pencil = build_pencil(c)
    payload = {
        "lambdas": [[v.real, v.imag] for v in pencil.lambdas],
        "permutation": list(pencil.permutation),
        "forms": survey_forms(pencil, count, np.random.default_rng(seed)),
        "meta": {**_meta(state, c, seed), "count": count},
    }
    emit(dumps(payload), _out(state, out))
    return EXIT_OK


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one command and return its exit code.

    Args:
        argv: Arguments without the program name; defaults to sys.argv[1:]

    Returns:
        int: 0 on success, 1 on error, 2 on a theorem-violation verdict
    """
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        code = app(args=args, prog_name="real-subbundle-lab", standalone_mode=False)
    except click.ClickException as exc:
        _error(exc.format_message())
        return EXIT_ERROR
    except click.exceptions.Abort:
        return EXIT_ERROR
    except (LabError, ValidationError, ValueError, OSError) as exc:
        _error(str(exc))
        return EXIT_ERROR
    finally:
        use_settings(None)
    return code if isinstance(code, int) else EXIT_OK


def main() -> None:
    """Console-script entry point."""
    sys.exit(dispatch())
