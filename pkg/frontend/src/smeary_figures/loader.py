"""Read the simulation CSV written by the smeary command line tool.

The file format is fixed: a header line naming the ten columns, then one
row per (beta, n) cell.  The loader validates every row and reports the
offending line number on failure; it never silently drops data.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

HEADER = (
    "m",
    "beta",
    "alpha",
    "n",
    "reps",
    "V",
    "stderr_V",
    "mean_iterations",
    "nonconverged",
    "seed",
)


class RenderInputError(Exception):
    """The input CSV or the requested plot options are invalid."""


@dataclass(frozen=True)
class Row:
    """One simulation cell: the variance V for a (m, beta, n) triple."""

    m: int
    beta: float
    alpha: float
    n: int
    reps: int
    V: float
    stderr_V: float
    mean_iterations: float
    nonconverged: int
    seed: int


def _parse_row(path: str, lineno: int, tokens: list) -> Row:
    converters = (int, float, float, int, int, float, float, float, int, int)
    values = []
    for name, conv, tok in zip(HEADER, converters, tokens):
        try:
            values.append(conv(tok))
        except ValueError:
            raise RenderInputError(
                f"{path}:{lineno}: field {name!r} is not numeric: {tok!r}"
            ) from None
    row = Row(*values)
    if row.n < 1:
        raise RenderInputError(f"{path}:{lineno}: n must be >= 1")
    if row.V < 0.0:
        raise RenderInputError(f"{path}:{lineno}: V must be >= 0")
    return row


def load_rows(path: str) -> list:
    """Parse a simulation CSV into a list of Row, strictly validated."""
    try:
        raw = Path(path).read_text(encoding="ascii")
    except OSError as exc:
        raise RenderInputError(f"cannot read {path}: {exc}") from exc
    lines = [ln for ln in raw.splitlines() if ln.strip()]
    if not lines:
        raise RenderInputError(f"{path}: empty file")
    header = tuple(tok.strip() for tok in lines[0].split(","))
    if header != HEADER:
        raise RenderInputError(
            f"{path}:1: expected header {','.join(HEADER)}"
        )
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        tokens = [tok.strip() for tok in line.split(",")]
        if len(tokens) != len(HEADER):
            raise RenderInputError(
                f"{path}:{lineno}: expected {len(HEADER)} fields, "
                f"found {len(tokens)}"
            )
        rows.append(_parse_row(path, lineno, tokens))
    if not rows:
        raise RenderInputError(f"{path}: no data rows")
    return rows
