"""Plain-text tables and CSV files with exact rationals."""

from __future__ import annotations

import csv
import io
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence


def exact_decimal(x: Fraction) -> str | None:
    """Finite decimal expansion of x, or None when it does not terminate."""
    x = Fraction(x)
    d = x.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return None
    digits = max(twos, fives)
    scaled = abs(x.numerator) * 10 ** digits // x.denominator
    sign = "-" if x < 0 else ""
    if digits == 0:
        return f"{sign}{scaled}"
    whole, frac = divmod(scaled, 10 ** digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


def fmt(x) -> str:
    """Rationals print as p/q, followed by the decimal when it terminates."""
    if isinstance(x, bool) or x is None:
        return str(x)
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        dec = exact_decimal(x)
        return f"{x} ({dec})" if dec is not None else str(x)
    return str(x)


def fmt_message(msg) -> str:
    return f"[{msg[0]},{msg[1]}]"


def text_table(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    cells = [list(map(str, header))] + [[fmt(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def csv_text(header: Sequence[str], rows: Iterable[Sequence], seed: int | None) -> str:
    buf = io.StringIO()
    buf.write(f"# seed: {seed}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(c) for c in r])
    return buf.getvalue()


class Artifacts:
    """Writes files into one output directory, each stamped with the seed."""

    def __init__(self, out: str | Path | None, seed: int | None):
        self.out = Path(out) if out is not None else None
        self.seed = seed
        self.written: list[Path] = []
        if self.out is not None:
            self.out.mkdir(parents=True, exist_ok=True)

    def csv(self, name: str, header, rows) -> None:
        self._write(name, csv_text(header, list(rows), self.seed))

    def text(self, name: str, body: str) -> None:
        self._write(name, f"seed: {self.seed}\n\n{body}")

    def _write(self, name: str, body: str) -> None:
        if self.out is None:
            return
        path = self.out / name
        path.write_text(body)
        self.written.append(path)
