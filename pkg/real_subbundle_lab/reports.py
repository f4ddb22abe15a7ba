"""
Report serialization.

JSON is canonical: sorted keys, fixed separators, no timestamps, non-finite
floats written as strings, so identical runs give byte-identical files.
CSV is used for per-trial survey rows only; its first line is the run block
as a comment.

Author: Ruslan Magana Vsevolodovna
Website: ruslanmv.com
License: Apache 2.0
"""

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import typer

from config.settings import Tolerances
from real_subbundle_lab import __version__
from real_subbundle_lab.curve import RealHyperellipticCurve

SURVEY_CSV_COLUMNS: Sequence[str] = ("trial", "recipe", "count", "flags", "signature")
CSV_META_PREFIX = "# meta "


def run_meta(
    curve: Optional[RealHyperellipticCurve],
    seed: Optional[int],
    tolerances: Tolerances,
) -> Dict[str, Any]:
    """Self-describing block embedded in every output."""
    return {
        "curve_hash": curve.content_hash() if curve is not None else None,
        "curve": curve.spec() if curve is not None else None,
        "seed": seed,
        "version": __version__,
        "tolerances": tolerances.model_dump(),
    }


def _jsonable(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return "inf" if value > 0 else ("-inf" if value < 0 else "nan")
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item") and callable(value.item):
        return _jsonable(value.item())
    return value


def dumps(payload: Dict[str, Any]) -> str:
    """
    Canonical JSON text of a report payload.

    Args:
        payload: Report dictionary; numpy scalars and non-finite floats allowed

    Returns:
        str: Indented JSON with sorted keys and a trailing newline
    """
    return json.dumps(_jsonable(payload), sort_keys=True, indent=2, separators=(",", ": ")) + "\n"


def survey_csv(rows: Iterable[List[object]], meta: Optional[Dict[str, Any]] = None) -> str:
    """
    Per-trial survey rows as CSV.

    When ``meta`` is given it is written first as a single ``# meta `` comment
    line holding compact canonical JSON, so the file carries the same run
    block as the JSON reports.
    """
    buffer = io.StringIO()
    if meta is not None:
        compact = json.dumps(_jsonable(meta), sort_keys=True, separators=(",", ":"))
        buffer.write(f"{CSV_META_PREFIX}{compact}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SURVEY_CSV_COLUMNS)
    writer.writerows(rows)
    return buffer.getvalue()


def emit(text: str, out: Optional[Path]) -> None:
    """Write to ``out`` when given, else to standard output."""
    if out is None:
        typer.echo(text, nl=False)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
