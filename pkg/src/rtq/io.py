"""JSON decoding of matrices and series, and deterministic CSV tables."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from . import __version__
from .bogoliubov import (
    BogoliubovTransform,
    PerturbativeBogoliubov,
    random_symplectic_series,
)

SERIES_KEYS = ("alpha0", "alpha1", "alpha2", "beta1", "beta2")


def matrix_from_json(obj, name: str = "matrix") -> np.ndarray:
    """Decode a square matrix whose entries are reals or ``[re, im]`` pairs.

    Args:
        obj: Nested list of rows.
        name: Field name used in error messages.

    Returns:
        Complex 2-D array.
    """
    if not isinstance(obj, list) or not obj or not all(isinstance(row, list) for row in obj):
        raise ValueError(f"{name}: expected a nonempty list of rows")
    n = len(obj)
    out = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(obj):
        if len(row) != n:
            raise ValueError(f"{name}: row {i} has {len(row)} entries, expected {n}")
        for j, entry in enumerate(row):
            if isinstance(entry, list):
                if len(entry) != 2:
                    raise ValueError(f"{name}[{i}][{j}]: complex entries are [re, im] pairs")
                out[i, j] = complex(float(entry[0]), float(entry[1]))
            else:
                out[i, j] = float(entry)
    return out


def matrix_to_json(matrix: np.ndarray) -> list:
    """Encode a complex matrix as rows of ``[re, im]`` pairs."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(matrix, dtype=complex)]


def series_from_dict(doc: Mapping, h: float | None = None) -> PerturbativeBogoliubov:
    """Build a perturbative series from its JSON description.

    Either ``{"random": {"seed", "n_modes", "scale"?, "tau"?}}`` or explicit
    coefficient matrices. Missing explicit coefficients default to zero and a
    missing ``alpha0`` to the identity.
    """
    h = float(doc.get("h", 0.0)) if h is None else float(h)
    if "random" in doc:
        spec = doc["random"]
        return random_symplectic_series(
            int(spec["seed"]),
            int(spec["n_modes"]),
            h=h,
            scale=float(spec.get("scale", 1.0)),
            tau=None if spec.get("tau") is None else float(spec["tau"]),
        )
    given = {key: matrix_from_json(doc[key], f"series.{key}") for key in SERIES_KEYS if key in doc}
    if not given:
        n = int(doc.get("n_modes", 0))
        if n < 1:
            raise ValueError("series: give coefficient matrices, a random block or n_modes")
    else:
        n = next(iter(given.values())).shape[0]
    zeros = np.zeros((n, n), dtype=complex)
    return PerturbativeBogoliubov(
        alpha0=given.get("alpha0", np.eye(n, dtype=complex)),
        alpha1=given.get("alpha1", zeros),
        alpha2=given.get("alpha2", zeros),
        beta1=given.get("beta1", zeros),
        beta2=given.get("beta2", zeros),
        h=h,
    )


def series_to_dict(series: PerturbativeBogoliubov) -> dict:
    out = {key: matrix_to_json(getattr(series, key)) for key in SERIES_KEYS}
    out["h"] = series.h
    return out


def transform_from_dict(doc: Mapping) -> BogoliubovTransform:
    """Exact transform from ``{"alpha": ..., "beta": ...}``."""
    return BogoliubovTransform(matrix_from_json(doc["alpha"], "alpha"), matrix_from_json(doc["beta"], "beta"))


def config_digest(config: Mapping) -> str:
    """SHA-256 of the canonical JSON form (sorted keys, no whitespace)."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), allow_nan=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def format_cell(value: Any) -> str:
    """Reals with 17 significant digits, integers verbatim, ``None`` as empty."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        return "%.17g" % value
    return str(value)


@dataclass
class ResultTable:
    """Header, rows and provenance footer of one CLI run."""

    columns: Sequence[str]
    rows: list = field(default_factory=list)
    digest: str = ""

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_cell(v) for v in row])
        buf.write(f"# config_sha256={self.digest}\n")
        buf.write(f"# rtq_version={__version__}\n")
        return buf.getvalue()

    def column(self, name: str) -> list:
        i = list(self.columns).index(name)
        return [row[i] for row in self.rows]


def read_csv_table(text: str) -> tuple[list, list]:
    """Parse CSV text written by :meth:`ResultTable.to_csv`, skipping the footer."""
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    reader = list(csv.reader(lines))
    return reader[0], reader[1:]
