"""JSON and CSV formats for matrices, channels and sweep results."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np

from . import linalg as la
from .channels import (CANONICAL, NORMALIZED, ChiMatrix, EvolutionMatrix, KrausSet,
                       UnitaryDilation, chi_to_evolution, chi_to_kraus, evolution_to_chi,
                       kraus_to_chi, kraus_to_dilation, dilation_to_kraus)
from .errors import ValidationError

REPRESENTATIONS = ("kraus", "chi", "evolution", "dilation")


def fmt(x: float) -> str:
    """17 significant digits: enough for a lossless float round trip."""
    return format(float(x), ".17g")


def matrix_to_json(m) -> dict:
    m = la.as_matrix(m)
    return {"rows": m.shape[0], "cols": m.shape[1],
            "entries": [[float(z.real), float(z.imag)] for z in m.reshape(-1)]}


def matrix_from_json(d: Mapping[str, Any]) -> np.ndarray:
    try:
        rows, cols, entries = int(d["rows"]), int(d["cols"]), d["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed matrix object: {exc}") from None
    if rows < 1 or cols < 1 or len(entries) != rows * cols:
        raise ValidationError(f"matrix needs {rows * cols} entries, got {len(entries)}")
    try:
        flat = np.array([complex(re, im) for re, im in entries])
    except (TypeError, ValueError):
        raise ValidationError("matrix entries must be [re, im] pairs") from None
    return la.as_matrix(flat.reshape(rows, cols))


def channel_to_json(ch, **metadata) -> dict:
    if isinstance(ch, KrausSet):
        out = {"representation": "kraus", "dim": ch.in_dim,
               "operators": [matrix_to_json(op) for op in ch.operators]}
    elif isinstance(ch, ChiMatrix):
        out = {"representation": "chi", "dim": ch.dim, "trace_convention": ch.convention,
               "matrix": matrix_to_json(ch.matrix)}
    elif isinstance(ch, EvolutionMatrix):
        out = {"representation": "evolution", "dim": ch.dim, "matrix": matrix_to_json(ch.matrix)}
    elif isinstance(ch, UnitaryDilation):
        out = {"representation": "dilation", "dim": ch.sys_dim, "env_dim": ch.env_dim,
               "env_initial": ch.env_initial, "matrix": matrix_to_json(ch.matrix)}
    else:
        raise ValidationError(f"cannot serialize {type(ch).__name__}")
    if metadata:
        out["metadata"] = metadata
    return out


def channel_from_json(d: Mapping[str, Any]):
    rep = d.get("representation")
    if rep not in REPRESENTATIONS:
        raise ValidationError(f"representation must be one of {REPRESENTATIONS}, got {rep!r}")
    try:
        dim = int(d["dim"])
    except (KeyError, TypeError, ValueError):
        raise ValidationError("channel object needs an integer 'dim'") from None
    if rep == "kraus":
        ops = tuple(matrix_from_json(o) for o in d.get("operators", ()))
        k = KrausSet(ops)
        if k.in_dim != dim:
            raise ValidationError("dim does not match the Kraus operators")
        return k
    if "matrix" not in d:
        raise ValidationError(f"{rep} object needs a 'matrix'")
    m = matrix_from_json(d["matrix"])
    if rep == "chi":
        return ChiMatrix(m, dim, d.get("trace_convention", CANONICAL))
    if rep == "evolution":
        return EvolutionMatrix(m, dim)
    return UnitaryDilation(m, dim, int(d["env_dim"]), int(d.get("env_initial", 0)))


def to_chi(ch) -> ChiMatrix:
    if isinstance(ch, ChiMatrix):
        return ch.canonical()
    if isinstance(ch, KrausSet):
        return kraus_to_chi(ch)
    if isinstance(ch, EvolutionMatrix):
        return evolution_to_chi(ch)
    if isinstance(ch, UnitaryDilation):
        return kraus_to_chi(dilation_to_kraus(ch))
    raise ValidationError(f"not a channel: {type(ch).__name__}")


def convert(ch, target: str, trace_convention: str = CANONICAL):
    """Convert any channel representation into ``target``."""
    if target not in REPRESENTATIONS:
        raise ValidationError(f"unknown target representation {target!r}")
    if target == "dilation" and isinstance(ch, KrausSet):
        return kraus_to_dilation(ch)
    if target == "kraus" and isinstance(ch, UnitaryDilation):
        return dilation_to_kraus(ch)
    chi = to_chi(ch)
    if target == "chi":
        return chi.normalized() if trace_convention == NORMALIZED else chi
    if target == "evolution":
        return chi_to_evolution(chi)
    kraus = chi_to_kraus(chi)
    return kraus if target == "kraus" else kraus_to_dilation(kraus)


def load_json(path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None


def dump_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=1) + "\n")


def write_csv(path, header: Iterable[str], rows: Iterable[Iterable]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(header))
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    Path(path).write_text(buf.getvalue())


SWEEP_HEADER = ("param", "value", "metric", "gate", "split")


def write_sweeps(path, results) -> None:
    write_csv(path, SWEEP_HEADER, (r for res in results for r in res.rows()))


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
