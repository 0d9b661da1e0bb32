"""Flat binary container for grid functions plus JSON sidecars.

Layout (little endian): header of four 64-bit values — dim, points_per_axis,
channels as int64 and box_half_width as float64 — followed by the payload of
interleaved re/im float64 samples in row-major channel-by-channel order. The
sidecar ``<path>.json`` records the originating family name and parameters.
"""

from __future__ import annotations

import json
import os
from typing import Mapping

import numpy as np

from .grid import GridFunction, GridSpec

_MAGIC_FIELDS = 4


def save_grid_function(path: str, f: GridFunction, family: str | None = None,
                       params: Mapping | None = None) -> None:
    header = np.empty(_MAGIC_FIELDS, dtype="<i8")
    header[0] = f.spec.dim
    header[1] = f.spec.points_per_axis
    header[2] = f.channels
    header[3] = np.float64(f.spec.box_half_width).view(np.int64)
    payload = np.empty(f.values.shape + (2,), dtype="<f8")
    payload[..., 0] = f.values.real
    payload[..., 1] = f.values.imag
    with open(path, "wb") as fh:
        fh.write(header.tobytes())
        fh.write(payload.tobytes())
    sidecar = {
        "family": family,
        "params": dict(params) if params else {},
        "support_radius": f.support_radius,
        "support_center": list(f.support_center) if f.support_center else None,
        "margin": f.spec.margin,
    }
    with open(path + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_grid_function(path: str) -> tuple[GridFunction, dict]:
    with open(path, "rb") as fh:
        header = np.frombuffer(fh.read(_MAGIC_FIELDS * 8), dtype="<i8")
        dim = int(header[0])
        n = int(header[1])
        channels = int(header[2])
        box_half_width = float(header[3:4].view("<f8")[0])
        payload = np.frombuffer(fh.read(), dtype="<f8")
    sidecar = {}
    if os.path.exists(path + ".json"):
        with open(path + ".json") as fh:
            sidecar = json.load(fh)
    margin = float(sidecar.get("margin") or 0.25)
    spec = GridSpec(dim=dim, box_half_width=box_half_width, points_per_axis=n, margin=margin)
    vals = payload.reshape((channels,) + spec.shape + (2,))
    values = vals[..., 0] + 1j * vals[..., 1]
    radius = sidecar.get("support_radius")
    center = sidecar.get("support_center")
    f = GridFunction(spec, values, support_radius=radius,
                     support_center=tuple(center) if center else None)
    return f, sidecar
