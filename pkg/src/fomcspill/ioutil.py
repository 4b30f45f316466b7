"""Small shared helpers for dates, deterministic text, and archive output.

Dates are handled with plain arithmetic on (year, month, day) tuples
rather than datetime64, so very long simulated samples do not hit the
nanosecond-precision year-2262 ceiling.
"""

from __future__ import annotations

import calendar
import hashlib
import io
import re
import zipfile

import numpy as np

from .errors import InputError

_DAY_RE = re.compile(r"^(\d{4,})-(\d{2})-(\d{2})$")
_MONTH_RE = re.compile(r"^(\d{4,})-(\d{2})$")


def parse_day(text: str) -> tuple[int, int, int]:
    """Parse ``YYYY-MM-DD`` into a (year, month, day) tuple."""
    m = _DAY_RE.match(str(text))
    if not m:
        raise InputError(f"date {text!r} not in YYYY-MM-DD format")
    y, mo, d = (int(g) for g in m.groups())
    if not 1 <= mo <= 12:
        raise InputError(f"date {text!r} has month outside 1..12")
    if not 1 <= d <= calendar.monthrange(y, mo)[1]:
        raise InputError(f"date {text!r} has day outside the month")
    return y, mo, d


def parse_month(text: str) -> tuple[int, int]:
    """Parse ``YYYY-MM`` into a (year, month) tuple."""
    m = _MONTH_RE.match(str(text))
    if not m:
        raise InputError(f"month {text!r} not in YYYY-MM format")
    y, mo = (int(g) for g in m.groups())
    if not 1 <= mo <= 12:
        raise InputError(f"month {text!r} has month outside 1..12")
    return y, mo


def month_str(y: int, mo: int) -> str:
    return f"{y:04d}-{mo:02d}"


def month_range(first: str, last: str) -> list[str]:
    """All months from ``first`` to ``last`` inclusive, as YYYY-MM strings."""
    y0, m0 = parse_month(first)
    y1, m1 = parse_month(last)
    n = (y1 - y0) * 12 + (m1 - m0)
    if n < 0:
        raise InputError(f"month range runs backwards: {first} to {last}")
    out = []
    y, mo = y0, m0
    for _ in range(n + 1):
        out.append(month_str(y, mo))
        mo += 1
        if mo > 12:
            mo, y = 1, y + 1
    return out


def fmt12(x: float) -> str:
    """Format a float with 12 significant digits, normalizing negative zero."""
    v = float(x)
    if v == 0.0:
        v = 0.0
    return f"{v:.12g}"


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def save_arrays(path, **arrays) -> None:
    """Write arrays to an npz archive with fixed zip timestamps.

    ``np.savez`` stamps each member with the current clock time, which
    breaks byte-identical reruns. This writer pins the timestamp so the
    archive depends only on its contents. ``np.load`` reads it as usual.
    """
    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_STORED) as zf:
        for name in sorted(arrays):
            buf = io.BytesIO()
            np.lib.format.write_array(buf, np.asarray(arrays[name]), allow_pickle=False)
            info = zipfile.ZipInfo(name + ".npy", date_time=(1980, 1, 1, 0, 0, 0))
            zf.writestr(info, buf.getvalue())
