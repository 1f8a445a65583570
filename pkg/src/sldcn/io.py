"""On-disk formats: energy traces, field snapshots, run manifests.

* Energy CSV: header ``t,tau,E_eps,E_C,mass,dt_l2,dt_h1,accepted``, one row
  per record, 17 significant digits (floats round-trip bitwise), LF line
  endings, numeric fields only.
* Snapshot: binary, magic ``SLDC``, format version u16, basis size M u32,
  then M*M little-endian float64 coefficients in row-major order.
* Manifest: JSON echo of the configuration plus code version, seed,
  potential kind, wall times, and the outcome; written once per run
  directory.
"""

from __future__ import annotations

import json
import os
import struct
from dataclasses import dataclass

import numpy as np

from .energy import EnergyRecord
from .legendre import SpectralField

ENERGY_CSV_FIELDS = ("t", "tau", "E_eps", "E_C", "mass", "dt_l2", "dt_h1", "accepted")
ENERGY_CSV_HEADER = ",".join(ENERGY_CSV_FIELDS)

SNAPSHOT_MAGIC = b"SLDC"
SNAPSHOT_VERSION = 1
_SNAPSHOT_HEADER = struct.Struct("<4sHI")


class SnapshotFormatError(ValueError):
    """A snapshot file has a bad magic, version, or size."""


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_energy_csv(records, path) -> None:
    """Write per-step diagnostics; floats carry 17 significant digits."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(ENERGY_CSV_HEADER + "\n")
        for r in records:
            fh.write(
                f"{_fmt(r.t)},{_fmt(r.tau)},{_fmt(r.E_eps)},{_fmt(r.E_C)},"
                f"{_fmt(r.mass)},{_fmt(r.dt_l2)},{_fmt(r.dt_h1)},{int(r.accepted)}\n"
            )


def read_energy_csv(path) -> list[EnergyRecord]:
    """Parse a file written by :func:`write_energy_csv` (bitwise round trip)."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if header != ENERGY_CSV_HEADER:
            raise ValueError(f"unexpected energy CSV header: {header!r}")
        out = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(ENERGY_CSV_FIELDS):
                raise ValueError(f"malformed energy CSV row: {line!r}")
            out.append(EnergyRecord(
                t=float(parts[0]), tau=float(parts[1]), E_eps=float(parts[2]),
                E_C=float(parts[3]), mass=float(parts[4]), dt_l2=float(parts[5]),
                dt_h1=float(parts[6]), accepted=int(parts[7]),
            ))
    return out


def write_snapshot(field: SpectralField, path) -> None:
    """Write a coefficient snapshot in the ``SLDC`` binary format."""
    header = _SNAPSHOT_HEADER.pack(SNAPSHOT_MAGIC, SNAPSHOT_VERSION, field.M)
    data = np.ascontiguousarray(field.coeffs, dtype="<f8").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data)


def read_snapshot(path) -> SpectralField:
    """Read a snapshot, validating magic, version, and payload size."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _SNAPSHOT_HEADER.size:
        raise SnapshotFormatError("snapshot file too short for its header")
    magic, version, m = _SNAPSHOT_HEADER.unpack_from(blob)
    if magic != SNAPSHOT_MAGIC:
        raise SnapshotFormatError(f"bad snapshot magic {magic!r}")
    if version != SNAPSHOT_VERSION:
        raise SnapshotFormatError(f"unsupported snapshot version {version}")
    expected = _SNAPSHOT_HEADER.size + 8 * m * m
    if len(blob) != expected:
        raise SnapshotFormatError(
            f"snapshot payload has {len(blob) - _SNAPSHOT_HEADER.size} bytes, "
            f"expected {8 * m * m} for M={m}"
        )
    coeffs = np.frombuffer(blob, dtype="<f8", offset=_SNAPSHOT_HEADER.size).reshape(m, m)
    return SpectralField(coeffs.astype(float))


@dataclass
class RunManifest:
    """Provenance of one run directory."""

    config: dict
    version: str
    seed: int
    potential: str
    started: str
    finished: str
    outcome: str  # "completed" | "blow-up" | "error"


def manifest_path(out_dir) -> str:
    return os.path.join(os.fspath(out_dir), "manifest.json")


def write_manifest(manifest: RunManifest, out_dir) -> None:
    payload = {
        "config": manifest.config,
        "version": manifest.version,
        "seed": manifest.seed,
        "potential": manifest.potential,
        "started": manifest.started,
        "finished": manifest.finished,
        "outcome": manifest.outcome,
    }
    with open(manifest_path(out_dir), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_manifest(out_dir) -> RunManifest:
    with open(manifest_path(out_dir), "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    return RunManifest(**payload)
