"""CSV and JSON artifact rendering and persistence.

Rendering is deterministic. CSV numbers use 17 significant digits and
integers are written exactly. JSON goes through the json module with sorted
keys; non-finite reals become the strings "nan", "inf" and "-inf", and
integers longer than the interpreter's str() digit limit become decimal
strings. Files are written to a temporary sibling first and then atomically
replaced.
"""

import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence, TextIO, Union

import numpy as np

from config import OUTPUT, get_logger
from config.exceptions import ConfigurationError, StorageError

logger = get_logger(__name__)

PathLike = Union[str, Path]

# Below the smallest digit limit the interpreter accepts (640)
_CHUNK_DIGITS = 512
_CHUNK = 10**_CHUNK_DIGITS
_BITS_PER_DIGIT = math.log2(10)


def _fits_str(value: int) -> bool:
    """True when str(value) is within the interpreter's digit limit."""
    limit = getattr(sys, "get_int_max_str_digits", lambda: 0)()
    return not limit or abs(value).bit_length() <= (limit - 1) * _BITS_PER_DIGIT


def _int_text(value: int) -> str:
    """Exact decimal text of an integer of any size."""
    if _fits_str(value):
        return str(value)
    sign = "-" if value < 0 else ""
    value = abs(value)
    chunks: List[int] = []
    while value:
        value, low = divmod(value, _CHUNK)
        chunks.append(low)
    head = str(chunks.pop())
    return sign + head + "".join(str(c).zfill(_CHUNK_DIGITS) for c in reversed(chunks))


def format_number(value: Any) -> str:
    """Render a number: integers exactly, reals with 17 significant digits."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return _int_text(int(value))
    if isinstance(value, Fraction):
        value = value.numerator / value.denominator
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, f".{OUTPUT.SIGNIFICANT_DIGITS}g")


def _cell(value: Any) -> str:
    if isinstance(value, str):
        return value
    return format_number(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """CSV text with a header row and fixed column order."""
    buffer = io.StringIO()
    writer = csv.writer(
        buffer, delimiter=OUTPUT.CSV_DELIMITER, lineterminator=OUTPUT.LINE_TERMINATOR
    )
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def render_matrix_csv(matrix: np.ndarray) -> str:
    """Dense matrix as headerless CSV."""
    buffer = io.StringIO()
    writer = csv.writer(
        buffer, delimiter=OUTPUT.CSV_DELIMITER, lineterminator=OUTPUT.LINE_TERMINATOR
    )
    for row in np.asarray(matrix):
        writer.writerow([format_number(v) for v in row])
    return buffer.getvalue()


def _encodable(value: Any) -> Any:
    """Copy of value with non-finite reals, oversized integers and non-str keys replaced."""
    if isinstance(value, dict):
        return {str(key): _encodable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_encodable(item) for item in value]
    if isinstance(value, float) and not math.isfinite(value):
        return format_number(value)
    if isinstance(value, int) and not isinstance(value, bool) and not _fits_str(value):
        return _int_text(value)
    return value


def _json_default(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return _encodable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return _encodable(int(value))
    if isinstance(value, (np.floating, Fraction)):
        return _encodable(float(value))
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def render_json(payload: Any) -> str:
    """JSON text with sorted keys, fixed indentation and a trailing newline."""
    text = json.dumps(
        _encodable(payload),
        default=_json_default,
        sort_keys=True,
        indent=OUTPUT.JSON_INDENT,
        allow_nan=False,
    )
    return text + "\n"


class ArtifactWriter:
    """Writes rendered artifacts to a file or to stdout."""

    def __init__(self, stream: Optional[TextIO] = None):
        self._stream = stream

    @property
    def stream(self) -> TextIO:
        return self._stream or sys.stdout

    def write(self, text: str, path: Optional[PathLike] = None) -> Optional[Path]:
        """Write text to path, or to stdout when path is None or "-".

        Returns:
            The written path, or None for stdout.

        Raises:
            StorageError: If the file cannot be written.
        """
        if path is None or str(path) == "-":
            self.stream.write(text)
            self.stream.flush()
            return None

        target = Path(path)
        temp_file = target.with_name(target.name + ".tmp")
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            with open(temp_file, "w", newline="") as f:
                f.write(text)
            temp_file.replace(target)
        except OSError as e:
            logger.error(f"Error writing artifact: {e}")
            raise StorageError(f"Failed to write artifact: {e}", {"path": str(target)}) from e
        logger.debug(f"Wrote {len(text)} characters to {target}")
        return target


def read_vector_csv(path: PathLike) -> np.ndarray:
    """Read a vector stored one number per line or as comma-separated rows.

    Raises:
        StorageError: If the file cannot be read.
        ConfigurationError: If a field is not a number or the file is empty.
    """
    try:
        with open(path, newline="") as f:
            rows = list(csv.reader(f, delimiter=OUTPUT.CSV_DELIMITER))
    except OSError as e:
        raise StorageError(f"Failed to read vector: {e}", {"path": str(path)}) from e

    values = []
    for line_no, row in enumerate(rows, start=1):
        for field in row:
            field = field.strip()
            if not field:
                continue
            try:
                values.append(float(field))
            except ValueError:
                raise ConfigurationError(
                    f"Non-numeric value '{field}' in vector file",
                    {"path": str(path), "line": line_no},
                ) from None
    if not values:
        raise ConfigurationError("Vector file is empty", {"path": str(path)})
    return np.array(values)
