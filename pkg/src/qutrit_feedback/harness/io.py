"""CSV and manifest writers.  Floats use ``repr`` so reruns are byte-identical."""
from __future__ import annotations

import csv
import hashlib
import json
import os

import numpy as np


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_rows(path: str, header: list[str], rows) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(x) for x in r])
    return path


def write_series_csv(path: str, times, mean, stderr, n_traj: int, neg_eigs=None) -> str:
    """Columns ``t, mean_negativity, stderr, n_traj`` and optionally ``neg_eig_1..k``.

    ``neg_eigs`` is an ``(n_times, k)`` array of the most negative
    partial-transpose eigenvalues (blank where fewer than ``k`` are negative).
    """
    header = ["t", "mean_negativity", "stderr", "n_traj"]
    k = 0 if neg_eigs is None else neg_eigs.shape[1]
    header += [f"neg_eig_{i + 1}" for i in range(k)]
    rows = []
    for i, t in enumerate(times):
        row = [float(t), float(mean[i]), float(stderr[i]), int(n_traj)]
        if k:
            row += [float(v) if np.isfinite(v) else None for v in neg_eigs[i]]
        rows.append(row)
    return write_rows(path, header, rows)


def write_events_csv(path: str, events) -> str:
    rows = [[float(e.time), e.site, e.kind, e.label, float(e.delta)] for e in events]
    return write_rows(path, ["event_time", "site", "kind", "label", "delta"], rows)


def sha256(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def write_manifest(path: str, payload: dict) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
