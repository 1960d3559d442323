"""Pair files, bundled examples and canonical JSON output."""

from __future__ import annotations

import dataclasses
import enum
import json
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from .lattice import (
    DEFAULT_HEIGHT_BOUND,
    BoundaryComponent,
    CurveRecord,
    DivisorClass,
    Lattice,
    SurfacePair,
)


class SchemaError(ValueError):
    """A pair file does not have the expected shape."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path or '.'}: {message}")
        self.path = path
        self.message = message


def _int(v, path: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaError(path, f"expected an integer, got {v!r}")
    return v


def _bool(v, path: str) -> bool:
    if not isinstance(v, bool):
        raise SchemaError(path, f"expected true or false, got {v!r}")
    return v


def _vector(v, path: str, rank: int) -> DivisorClass:
    if not isinstance(v, list):
        raise SchemaError(path, "expected a list of integers")
    if len(v) != rank:
        raise SchemaError(path, f"expected {rank} entries, got {len(v)}")
    return DivisorClass(_int(x, f"{path}[{i}]") for i, x in enumerate(v))


def _object(v, path: str, required: tuple, optional: tuple) -> dict:
    if not isinstance(v, dict):
        raise SchemaError(path, "expected an object")
    for k in required:
        if k not in v:
            raise SchemaError(f"{path}.{k}", "missing required key")
    extra = set(v) - set(required) - set(optional)
    if extra:
        raise SchemaError(f"{path}.{sorted(extra)[0]}", "unknown key")
    return v


def pair_from_dict(d: dict) -> SurfacePair:
    d = _object(
        d,
        "",
        ("rank", "gram", "K", "chi", "sigma"),
        ("components", "curves", "height_bound", "name", "reference"),
    )
    rank = _int(d["rank"], ".rank")
    if rank < 1:
        raise SchemaError(".rank", "rank must be positive")
    gram = d["gram"]
    if not isinstance(gram, list) or len(gram) != rank:
        raise SchemaError(".gram", f"expected {rank} rows")
    rows = []
    for i, row in enumerate(gram):
        if not isinstance(row, list) or len(row) != rank:
            raise SchemaError(f".gram[{i}]", f"expected {rank} entries")
        rows.append([_int(x, f".gram[{i}][{j}]") for j, x in enumerate(row)])
    comps = []
    for i, c in enumerate(d.get("components", [])):
        p = f".components[{i}]"
        c = _object(c, p, ("class",), ("smooth", "rational", "label"))
        comps.append(
            BoundaryComponent(
                _vector(c["class"], p + ".class", rank),
                _bool(c.get("smooth", True), p + ".smooth"),
                _bool(c.get("rational", False), p + ".rational"),
                str(c.get("label", "")),
            )
        )
    curves = []
    for i, c in enumerate(d.get("curves", [])):
        p = f".curves[{i}]"
        c = _object(c, p, ("class",), ("smooth", "rational", "irreducible", "label"))
        curves.append(
            CurveRecord(
                _vector(c["class"], p + ".class", rank),
                _bool(c.get("rational", False), p + ".rational"),
                _bool(c.get("smooth", True), p + ".smooth"),
                _bool(c.get("irreducible", True), p + ".irreducible"),
                str(c.get("label", "")),
            )
        )
    ref = d.get("reference")
    return SurfacePair(
        lattice=Lattice(rows),
        K=_vector(d["K"], ".K", rank),
        components=tuple(comps),
        catalog=tuple(curves),
        chi=_int(d["chi"], ".chi"),
        sigma=_int(d["sigma"], ".sigma"),
        name=str(d.get("name", "")),
        height_bound=_int(d.get("height_bound", DEFAULT_HEIGHT_BOUND), ".height_bound"),
        reference=None if ref is None else _vector(ref, ".reference", rank),
    )


def _ints(c: DivisorClass) -> list[int]:
    return [int(x) for x in c.coeffs]


def pair_to_dict(p: SurfacePair) -> dict:
    out = {
        "name": p.name,
        "rank": p.rank,
        "gram": [list(r) for r in p.lattice.gram],
        "K": _ints(p.K),
        "chi": p.chi,
        "sigma": p.sigma,
        "height_bound": p.height_bound,
        "components": [
            {"class": _ints(c.cls), "smooth": c.smooth, "rational": c.rational, **({"label": c.label} if c.label else {})}
            for c in p.components
        ],
        "curves": [
            {"class": _ints(c.cls), "rational": c.rational, "smooth": c.smooth, **({"label": c.label} if c.label else {})}
            for c in p.catalog
        ],
    }
    if p.reference is not None:
        out["reference"] = _ints(p.reference)
    return out


# --- bundled examples --------------------------------------------------------


def _data_dir():
    return resources.files("logsurf") / "data"


def bundled_examples() -> list[str]:
    return sorted(f.name[:-5] for f in _data_dir().iterdir() if f.name.endswith(".json"))


def bundled_text(name: str) -> str:
    f = _data_dir() / f"{name}.json"
    if not f.is_file():
        raise FileNotFoundError(f"no bundled example named {name!r}")
    return f.read_text()


def load_pair(source) -> SurfacePair:
    """Read a pair from a file path, or from a bundled example by name."""
    path = Path(source)
    if path.is_file():
        text = path.read_text()
    elif str(source) in bundled_examples():
        text = bundled_text(str(source))
    else:
        raise FileNotFoundError(f"{source}: no such file or bundled example")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError("", f"invalid JSON: {e}") from e
    p = pair_from_dict(data)
    if not p.name:
        p = dataclasses.replace(p, name=path.stem)
    return p


# --- canonical JSON --------------------------------------------------------


def jsonable(x):
    """Plain JSON data; rationals become exact "p/q" strings."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, DivisorClass):
        return [str(c) for c in x.coeffs]
    if isinstance(x, enum.Enum):
        return x.value
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.ndarray):
        return [jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if dataclasses.is_dataclass(x):
        return {f.name: jsonable(getattr(x, f.name)) for f in dataclasses.fields(x)}
    raise TypeError(f"cannot serialise {type(x).__name__}")


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
