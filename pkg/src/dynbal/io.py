"""CSV output for round traces and experiment summaries.

All amounts are rendered as exact decimal strings (dyadic values always
have one), so a trace can be parsed back without any rounding ambiguity.
The converged flag renders as "true"/"false"; check columns use "0" for
pass, "1" for fail, and empty for rounds where the check did not run
(round zero, or rounds skipped by the check stride).
"""

from __future__ import annotations

import csv
from typing import Sequence

from .dyadic import Dyadic

TRACE_COLUMNS = ("round", "phi", "max_gap", "d_r", "connections", "converged")

SUMMARY_COLUMNS = (
    "seed",
    "converged",
    "converged_at",
    "rounds",
    "budget",
    "final_gap",
    "min_max_gap",
    "invariant_failures",
    "aborted",
)


def render_amount(value) -> str:
    """Exact decimal text for an int or dyadic amount."""
    if isinstance(value, Dyadic):
        return value.decimal_str()
    return str(value)


class TraceCsvWriter:
    """Writes one row per retained round of a single trial."""

    def __init__(self, stream, checks: Sequence[str] = (), close_stream: bool = False):
        self.checks = tuple(checks)
        self._stream = stream
        self._close_stream = close_stream
        self._writer = csv.writer(stream)
        self._writer.writerow(TRACE_COLUMNS + self.checks)

    def round_row(
        self,
        *,
        round_index: int,
        phi,
        max_gap,
        d_r,
        connections: int,
        converged: bool,
        report=None,
    ) -> None:
        row = [
            round_index,
            render_amount(phi),
            render_amount(max_gap),
            render_amount(d_r),
            connections,
            "true" if converged else "false",
        ]
        for name in self.checks:
            if report is None or name not in report.checks:
                row.append("")
            else:
                row.append("0" if report.checks[name] else "1")
        self._writer.writerow(row)

    def close(self) -> None:
        if self._close_stream:
            self._stream.close()


def open_trace_writer(path, checks: Sequence[str] = ()) -> TraceCsvWriter:
    """Open `path` for writing and wrap it in a TraceCsvWriter that owns it."""
    stream = open(path, "w", newline="")
    return TraceCsvWriter(stream, checks, close_stream=True)


def write_experiment_summary(stream, trials) -> None:
    """One row per trial: convergence, rounds used, failures, abort reason."""
    writer = csv.writer(stream)
    writer.writerow(SUMMARY_COLUMNS)
    for t in trials:
        writer.writerow(
            [
                t.seed,
                "true" if t.converged else "false",
                "" if t.converged_at is None else t.converged_at,
                t.rounds_played,
                t.budget,
                render_amount(t.final_gap),
                render_amount(t.min_max_gap),
                t.invariant_failures,
                t.aborted or "",
            ]
        )
