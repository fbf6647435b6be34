"""
CSV emission for spectra, decay curves, error sweeps and the turning-point table.

Files are UTF-8, comma separated, LF line endings, one header row. Floats are
written with 17 significant digits so that every value round-trips exactly.
"""

import csv
import logging
import sys
from numbers import Integral, Real
from threading import Lock
from typing import Any, Iterable, List, Optional, Sequence


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, Integral):
        return str(int(value))
    if isinstance(value, Real):
        return format(float(value), ".17g")
    return str(value)


class ResultCSVWriter:
    """
    Writes one table with a fixed header to a file or to stdout.
    This class is thread-safe.
    """

    def __init__(self, headers: Sequence[str], path: Optional[str] = None):
        """
        Args:
            headers: Column names, written once as the first row.
            path: Output file; None or '-' means stdout.
        """
        self.headers: List[str] = list(headers)
        self.path = None if path in (None, "-") else path
        self._lock = Lock()
        self.logger = logging.getLogger(__name__)

    def _emit(self, stream, rows: Iterable[Sequence[Any]]) -> int:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(self.headers)
        count = 0
        for row in rows:
            if len(row) != len(self.headers):
                raise ValueError(f"Row has {len(row)} fields, header has {len(self.headers)}")
            writer.writerow([format_value(v) for v in row])
            count += 1
        return count

    def write_rows(self, rows: Iterable[Sequence[Any]]) -> int:
        """
        Writes the header and all rows, replacing any existing file.

        Returns:
            Number of data rows written.

        Raises:
            OSError: the output file cannot be written.
        """
        with self._lock:
            if self.path is None:
                count = self._emit(sys.stdout, rows)
                sys.stdout.flush()
                return count
            try:
                with open(self.path, "w", newline="", encoding="utf-8") as f:
                    count = self._emit(f, rows)
            except OSError as e:
                self.logger.error(f"Failed to write results to {self.path}: {e}")
                raise
            self.logger.info(f"Wrote {count} rows to {self.path}")
            return count
