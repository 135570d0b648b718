"""JSON encoding of barcodes and comparison reports.

Bars are written as ``[birth, death, birth_site, death_site]``; a site is a
coordinate list or ``null`` (the cone point of the doubled graph). Infinite
deaths of essential bars are written as the string ``"inf"``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .core import Barcode, FieldError


def _num(x: float):
    return "inf" if x == math.inf else float(x)


def _parse_num(x) -> float:
    if x == "inf":
        return math.inf
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise FieldError(f"expected a number or \"inf\", got {x!r}")
    return float(x)


def _site(s):
    return None if s is None else [int(c) for c in s]


def encode_barcode(barcode: Barcode, site_of, dims=None) -> dict:
    """``{"dims": {...}, "essential": {...}}`` for the requested degrees."""
    dims = barcode.dims() if dims is None else dims
    finite = {str(k): [] for k in dims}
    essential = {str(k): [] for k in dims}
    for b in barcode.bars:
        if str(b.dim) in finite:
            finite[str(b.dim)].append(
                [_num(b.birth), _num(b.death), _site(site_of(b.birth_vertex)), _site(site_of(b.death_vertex))]
            )
    for b in barcode.essential:
        if str(b.dim) in essential:
            essential[str(b.dim)].append([_num(b.birth), "inf", _site(site_of(b.birth_vertex)), None])
    return {"dims": finite, "essential": essential}


@dataclass
class CompareReport:
    config: dict
    sftd: dict  # {"forward": {k: v}, "backward": {k: v}, "symmetric": {k: v}, "total": x}
    dims: dict  # forward orientation: {k: [[b, d, site, site], ...]}
    essential: dict
    backward: dict = field(default_factory=dict)  # {"dims": ..., "essential": ...}
    timing_ms: float | None = None

    def to_dict(self) -> dict:
        out = {
            "dims": self.dims,
            "essential": self.essential,
            "sftd": self.sftd,
            "config": self.config,
            "backward": self.backward,
        }
        if self.timing_ms is not None:
            out["timing_ms"] = self.timing_ms
        return out

    def to_json(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "CompareReport":
        data = loads(text)
        try:
            return cls(
                config=data["config"], sftd=data["sftd"], dims=data["dims"],
                essential=data["essential"], backward=data.get("backward", {}),
                timing_ms=data.get("timing_ms"),
            )
        except (KeyError, TypeError) as e:
            raise FieldError(f"malformed report: missing {e}") from None


def dumps(obj) -> str:
    return json.dumps(obj, allow_nan=False) + "\n"


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FieldError(f"malformed JSON: {e}") from None


def finite_diagram(data, dim: int) -> list[tuple[float, float]]:
    """Finite (birth, death) pairs of one degree from a decoded barcode JSON.

    A degree missing from the file counts as an empty diagram.
    """
    if not isinstance(data, dict) or not isinstance(data.get("dims", {}), dict):
        raise FieldError("malformed barcode JSON: expected an object with a \"dims\" object")
    rows = data.get("dims", {}).get(str(dim), [])
    if not isinstance(rows, list):
        raise FieldError(f"malformed barcode JSON: dims[{dim}] is not a list")
    out = []
    for row in rows:
        if not isinstance(row, list) or len(row) < 2:
            raise FieldError(f"malformed bar {row!r}")
        out.append((_parse_num(row[0]), _parse_num(row[1])))
    return out
