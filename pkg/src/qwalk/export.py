"""CSV/JSON writers for profiles and sweeps.

Floats are written as Python's shortest round-trip repr, CSV uses ``,``
and ``\\n`` only, so identical inputs always give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .coin import Coin
from .limits import LimitLaw, SweepRow, limit_cdf
from .stationary import StationaryProfile

__all__ = [
    "PROFILE_COLUMNS",
    "SWEEP_COLUMNS",
    "profile_columns",
    "render_profile",
    "export_profile",
    "load_profile_json",
    "render_sweep",
    "export_sweep",
    "coin_metadata",
    "csv_text",
    "json_text",
]

PROFILE_COLUMNS = ("n", "x", "phi_norm_sq", "mu", "F_M", "F_limit", "abs_diff")
SWEEP_COLUMNS = ("M", "regime", "theta_star_effective", "ks")


def _num(v):
    if v is None:
        return None
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return int(v)
    f = float(v)
    if not math.isfinite(f):
        raise ValueError(f"refusing to export non-finite value {f!r}")
    return f


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    return repr(_num(v))


def _write_text(text: str, path) -> None:
    with open(Path(path), "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def csv_text(header: Iterable[str], rows: Iterable[Iterable[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def coin_metadata(coin: Coin) -> dict:
    return {k: [v.real, v.imag] for k, v in zip("abcd", coin.entries())}


def profile_columns(profile: StationaryProfile, law: LimitLaw | None = None) -> dict[str, list]:
    """Column-major table of a profile, optionally against a limit CDF."""
    n = np.arange(profile.M)
    x = n / profile.M
    F_M = profile.cdf
    cols = {
        "n": [int(v) for v in n],
        "x": [float(v) for v in x],
        "phi_norm_sq": [float(v) for v in profile.site_norm_sq],
        "mu": [float(v) for v in profile.mu],
        "F_M": [float(v) for v in F_M],
    }
    if law is None:
        cols["F_limit"] = [None] * profile.M
        cols["abs_diff"] = [None] * profile.M
    else:
        ref = np.atleast_1d(limit_cdf(law, n.astype(np.float64) if law.on_site_axis else x))
        cols["F_limit"] = [float(v) for v in ref]
        cols["abs_diff"] = [float(v) for v in np.abs(F_M - ref)]
    return cols


def render_profile(
    profile: StationaryProfile,
    law: LimitLaw | None = None,
    fmt: str = "csv",
    metadata: dict | None = None,
) -> str:
    cols = profile_columns(profile, law)
    if fmt == "csv":
        return csv_text(PROFILE_COLUMNS, zip(*(cols[c] for c in PROFILE_COLUMNS)))
    if fmt == "json":
        meta = dict(metadata or {})
        meta.setdefault("M", profile.M)
        meta.setdefault("comfortability", float(profile.comfortability))
        meta["law"] = None if law is None else law.to_dict()
        return json_text({"metadata": meta, "columns": {c: cols[c] for c in PROFILE_COLUMNS}})
    raise ValueError(f"unknown format {fmt!r}")


def export_profile(
    profile: StationaryProfile,
    law: LimitLaw | None,
    path,
    fmt: str = "csv",
    metadata: dict | None = None,
) -> None:
    """
    Write a profile table with columns ``n,x,phi_norm_sq,mu,F_M,F_limit,abs_diff``.

    Without a law the last two columns are present but empty (null in
    JSON). JSON adds a ``metadata`` object; ``comfortability`` and the law
    are always recorded there so :func:`load_profile_json` can rebuild
    the inputs.
    """
    _write_text(render_profile(profile, law, fmt, metadata), path)


def load_profile_json(path) -> tuple[StationaryProfile, LimitLaw | None, dict]:
    """Inverse of the JSON branch of :func:`export_profile`."""
    with open(Path(path), encoding="utf-8") as fh:
        doc = json.load(fh)
    meta = doc["metadata"]
    profile = StationaryProfile.from_site_norms(doc["columns"]["phi_norm_sq"], meta["comfortability"])
    law = None if meta.get("law") is None else LimitLaw.from_dict(meta["law"])
    return profile, law, meta


def _row_values(row: SweepRow) -> list:
    return [row.M, row.regime.value, row.theta_star_effective, row.ks]


def render_sweep(rows: list[SweepRow], fmt: str = "csv") -> str:
    if fmt == "csv":
        return csv_text(SWEEP_COLUMNS, (_row_values(r) for r in rows))
    if fmt == "json":
        return json_text([
            {k: (v if isinstance(v, str) else _num(v)) for k, v in zip(SWEEP_COLUMNS, _row_values(r))}
            for r in rows
        ])
    raise ValueError(f"unknown format {fmt!r}")


def export_sweep(rows: list[SweepRow], path, fmt: str = "csv") -> None:
    """Write sweep rows (``M,regime,theta_star_effective,ks``) in input order."""
    _write_text(render_sweep(rows, fmt), path)
