"""
Deterministic CSV and JSON output.

Floats are written with 17 significant digits so that a value read back is bit-identical. Data
files never contain timestamps; identical inputs give byte-identical files.
"""
import csv
import io
import json
import logging
import math
import sys
from typing import Any, Iterable, Sequence

import numpy as np

from QCatLab.norms import DecoherenceCurve


logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
"""int: Version of the JSON report layout"""

CURVE_HEADER = ('tau', 'n1', 'n2', 'n_ratio')
"""tuple[str, ...]: Column order of decoherence curve files"""

PROPAGATOR_HEADER = ('m', 'n', 'k', 'tau', 'value')
"""tuple[str, ...]: Column order of propagator tables"""


def format_float(value: float) -> str:
    """Format a float with 17 significant digits"""
    return format(float(value), '.17g')


def format_twice(twice_value: int) -> str:
    """Format a twice-integer index as an integer or a half-integer ('3', '-5/2')"""
    if twice_value % 2 == 0:
        return str(twice_value // 2)
    return f'{twice_value}/2'


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def curve_csv(curve: DecoherenceCurve) -> str:
    """
    Render a decoherence curve as CSV text with header ``tau,n1,n2,n_ratio``.

    Parameters
    ----------
    curve : :py:class:`~QCatLab.norms.DecoherenceCurve`
        Curve to render

    Returns
    -------
    str
        CSV text (one row per sample)
    """
    rows = ([format_float(value) for value in row]
            for row in zip(curve.taus, curve.n1, curve.n2, curve.n_ratio))
    return _csv_text(CURVE_HEADER, rows)


def propagator_csv(rows: Iterable[tuple[int, int, int, float, float]]) -> str:
    """
    Render propagator values as CSV text with header ``m,n,k,tau,value``.

    Parameters
    ----------
    rows : Iterable[tuple[int, int, int, float, float]]
        Rows (2m, 2n, 2k, tau, value); indices are written as (half-)integers

    Returns
    -------
    str
        CSV text
    """
    formatted = ((format_twice(twice_m), format_twice(twice_n), format_twice(twice_k),
                  format_float(tau), format_float(value))
                 for twice_m, twice_n, twice_k, tau, value in rows)
    return _csv_text(PROPAGATOR_HEADER, formatted)


def json_safe(value: Any) -> Any:
    """
    Convert numpy scalars and arrays, tuples and complex numbers into JSON types.

    Complex numbers become ``[re, im]``.

    Parameters
    ----------
    value : Any
        Value to convert

    Returns
    -------
    Any
        JSON-compatible value
    """
    if isinstance(value, dict):
        return {str(key): json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(item) for item in value]
    if isinstance(value, np.ndarray):
        return [json_safe(item) for item in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def report_json(report: dict) -> str:
    """
    Render a report as JSON text with sorted keys and a ``schema_version`` field.

    Parameters
    ----------
    report : dict
        Report content

    Returns
    -------
    str
        JSON text ending in a newline

    Raises
    ------
    ValueError
        If the report contains NaN or infinite floats
    """
    content = json_safe(report)
    content['schema_version'] = SCHEMA_VERSION
    return json.dumps(content, sort_keys=True, indent=2, allow_nan=False) + '\n'


def sanitize_floats(value: Any) -> Any:
    """Replace non-finite floats by their string names ('inf', '-inf', 'nan')"""
    if isinstance(value, dict):
        return {key: sanitize_floats(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [sanitize_floats(item) for item in value]
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def write_text(text: str, path: str = '') -> None:
    """
    Write text to a file (or to standard output for an empty path).

    Parameters
    ----------
    text : str
        Content
    path : str, default=''
        Output file
    """
    if not path:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, 'w', encoding='utf-8', newline='') as file:
        file.write(text)
    logger.info('Wrote %s', path)
