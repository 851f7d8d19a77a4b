"""CSV grid files with a JSON sidecar.

A grid file has one header line ``# u v name1 name2 ...`` followed by one row
per node, u-major (all v for the first u, then the next u), values written
with 17 significant digits so doubles survive a write/read cycle unchanged.
"""

import json
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .surface import ParamDomain

FMT = "%.17g"


def format_grid(domain: ParamDomain, columns: dict) -> str:
    names = list(columns)
    for name in names:
        if np.shape(columns[name]) != domain.shape:
            raise ValidationError(f"column {name!r} has shape {np.shape(columns[name])}, "
                                  f"expected {domain.shape}")
        if any(c.isspace() for c in name):
            raise ValidationError(f"column name {name!r} contains whitespace")
    U, V = domain.mesh()
    table = np.column_stack([U.ravel(), V.ravel()] + [np.asarray(columns[n], dtype=float).ravel()
                                                      for n in names])
    lines = ["# u v " + " ".join(names)]
    lines.extend(" ".join(FMT % x for x in row) for row in table)
    return "\n".join(lines) + "\n"


def write_grid(path, domain: ParamDomain, columns: dict):
    Path(path).write_text(format_grid(domain, columns), encoding="ascii")


def read_grid(path):
    """Return (domain, columns) from a grid file written by ``write_grid``."""
    text = Path(path).read_text(encoding="ascii").splitlines()
    if not text or not text[0].startswith("# u v"):
        raise ValidationError(f"{path}: missing '# u v ...' header")
    names = text[0][1:].split()[2:]
    data = np.array([[float(x) for x in line.split()] for line in text[1:] if line.strip()])
    if data.ndim != 2 or data.shape[1] != len(names) + 2:
        raise ValidationError(f"{path}: rows do not match the header")
    u = np.unique(data[:, 0])
    v = np.unique(data[:, 1])
    n_u, n_v = len(u), len(v)
    if n_u * n_v != len(data):
        raise ValidationError(f"{path}: nodes do not form a full rectangular grid")
    domain = ParamDomain(float(u[0]), float(u[-1]), float(v[0]), float(v[-1]), n_u, n_v)
    cols = {n: data[:, 2 + k].reshape(n_u, n_v) for k, n in enumerate(names)}
    return domain, cols


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"


def write_json(path, obj):
    Path(path).write_text(dump_json(obj), encoding="ascii")


def domain_dict(d: ParamDomain):
    return {"u_min": d.u_min, "u_max": d.u_max, "v_min": d.v_min, "v_max": d.v_max,
            "n_u": d.n_u, "n_v": d.n_v}
