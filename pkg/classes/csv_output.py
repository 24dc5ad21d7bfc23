"""
Deterministic CSV output: schema comment line, fixed column order, every float
in 17-significant-digit scientific notation, '\\n' line endings.
"""

import csv
import math
import sys
from contextlib import contextmanager
from io import StringIO
from typing import Any, Iterable, Iterator, Optional, Sequence, TextIO

import attrs

from constants.defaults import CSV_SCHEMA


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.16e}"
    return str(value)


@attrs.define
class CsvTable:
    columns: tuple[str, ...] = attrs.field(converter=tuple)
    rows: list[tuple] = attrs.field(factory=list)

    def add(self, *values: Any) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"Row has {len(values)} values for {len(self.columns)} columns.")
        self.rows.append(values)

    def extend(self, rows: Iterable[Sequence[Any]]) -> None:
        for row in rows:
            self.add(*row)

    def write(self, stream: TextIO) -> None:
        stream.write(CSV_SCHEMA + "\n")
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(self.columns)
        writer.writerows([format_value(v) for v in row] for row in self.rows)

    def render(self) -> str:
        buffer = StringIO()
        self.write(buffer)
        return buffer.getvalue()


@contextmanager
def output_stream(path: Optional[str]) -> Iterator[TextIO]:
    """The file at `path` (newline-exact), or standard output when no path is given."""
    if path is None or path == "-":
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as f:
        yield f
