"""File formats: CSV ingestion and result serialization.

All interchange is plain CSV/JSON. Floats in CSVs are written with 17
significant digits so double-precision values round-trip losslessly; JSON
floats use Python's shortest round-trip representation.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .core import StateAssignment, TimeSeries
from .driver import MasaResult
from .state_model import StateModel
from .synth import GroundTruth


class IngestError(ValueError):
    """CSV parse failure with 1-based row/column location."""

    def __init__(self, message: str, row: int | None = None, col: int | None = None):
        if row is not None:
            message = f"{message} (row {row}, col {col})"
        super().__init__(message)
        self.row = row
        self.col = col


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def ingest_csv(path, standardize: bool = False) -> TimeSeries:
    """Parse a numeric CSV (optional header) into a TimeSeries.

    Rejects non-numeric cells and NaN/Inf with their location. With
    standardize=True each column is z-scored (constant columns become 0).
    """
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]
    if not rows:
        raise IngestError(f"{path}: file is empty")
    header: list[str] | None = None
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
        if not rows:
            raise IngestError(f"{path}: no data rows after header")
    n_cols = len(rows[0])
    data = np.empty((len(rows), n_cols))
    offset = 2 if header is not None else 1
    for i, row in enumerate(rows):
        if len(row) != n_cols:
            raise IngestError(
                f"{path}: expected {n_cols} columns, got {len(row)}",
                row=i + offset, col=1,
            )
        for j, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise IngestError(
                    f"{path}: non-numeric cell {cell!r}", row=i + offset, col=j + 1
                ) from None
            if not math.isfinite(v):
                raise IngestError(
                    f"{path}: non-finite cell {cell!r}", row=i + offset, col=j + 1
                )
            data[i, j] = v
    if standardize:
        mean = data.mean(axis=0)
        std = data.std(axis=0)
        std[std == 0.0] = 1.0
        data = (data - mean) / std
    return TimeSeries(data, tuple(header) if header else None)


def write_data_csv(path, ts: TimeSeries) -> None:
    names = ts.column_names or tuple(f"x{j}" for j in range(ts.n_dims))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for row in ts.data:
            w.writerow([_fmt(v) for v in row])


def write_truth_csv(path, truth: GroundTruth) -> None:
    perturbed = truth.perturbed_mask
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "true_state", "motif_mask", "perturbed"])
        for t in range(len(truth.labels)):
            w.writerow([
                t,
                int(truth.labels[t]),
                int(truth.motif_mask[t]),
                int(perturbed[t]),
            ])


def read_truth_csv(path) -> GroundTruth:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        labels, motif_mask, perturbed = [], [], []
        for row in reader:
            labels.append(int(row["true_state"]))
            motif_mask.append(bool(int(row["motif_mask"])))
            perturbed.append(bool(int(row["perturbed"])))
    return GroundTruth(
        np.asarray(labels, dtype=np.int64),
        np.asarray(motif_mask, dtype=bool),
        np.asarray(perturbed, dtype=bool),
        seg_len=1,
    )


def _instance_index(result: MasaResult):
    """Per-measurement (motif_id, instance_id) from the locked instances."""
    t_len = result.assignment.t_len
    motif_id = np.full(t_len, -1, dtype=np.int64)
    instance_id = np.full(t_len, -1, dtype=np.int64)
    for mi, (_, instances) in enumerate(result.motifs.entries):
        for qi, inst in enumerate(instances):
            motif_id[inst.start : inst.end] = mi
            instance_id[inst.start : inst.end] = qi
    return motif_id, instance_id


def write_assignment_csv(path, result: MasaResult) -> None:
    motif_id, instance_id = _instance_index(result)
    labels = result.assignment.labels
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "state", "motif_id", "instance_id"])
        for t in range(len(labels)):
            w.writerow([
                t,
                int(labels[t]),
                "" if motif_id[t] < 0 else int(motif_id[t]),
                "" if instance_id[t] < 0 else int(instance_id[t]),
            ])


def read_assignment_csv(path) -> StateAssignment:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        col = "state" if "state" in reader.fieldnames else "true_state"
        labels = [int(row[col]) for row in reader]
    arr = np.asarray(labels, dtype=np.int64)
    return StateAssignment(arr, int(arr.max()) + 1)


def motifs_to_json(result: MasaResult) -> list[dict]:
    out = []
    for i, (motif, instances) in enumerate(result.motifs.entries):
        upsilon = (
            result.motifs.motif_scores[i] if result.motifs.motif_scores else None
        )
        entry = {
            "states": list(motif.states),
            "motif_score": upsilon,
            "instances": [
                {
                    "start": inst.start,
                    "end": inst.end,
                    "durations": list(inst.per_state_durations),
                    "instance_score": (
                        inst.score - upsilon if upsilon is not None else None
                    ),
                    "total_score": inst.score,
                }
                for inst in instances
            ],
        }
        out.append(entry)
    return out


def write_motifs_json(path, result: MasaResult) -> None:
    payload = {
        "total_score": result.motifs.total_score,
        "motifs": motifs_to_json(result),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def write_model_json(path, model: StateModel, gamma: float) -> None:
    payload = {
        "beta": model.beta,
        "gamma": gamma,
        "reg_lambda": model.reg_lambda,
        "states": [
            {
                "mean": st.mean.tolist(),
                "inv_cov": st.inv_cov.tolist(),
                "log_det": st.log_det,
            }
            for st in model.states
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def write_diagnostics_json(path, result: MasaResult, wall_time: float) -> None:
    payload = {
        "iterations": result.iterations,
        "converged": result.converged,
        "wall_time_seconds": wall_time,
        "history": list(result.history),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def write_metrics_json(path, metrics: dict) -> None:
    with open(path, "w") as fh:
        json.dump(metrics, fh, indent=2)
        fh.write("\n")


def write_bench_csv(path, rows: list[tuple[int, float]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t_len", "seconds"])
        for t_len, seconds in rows:
            w.writerow([t_len, _fmt(seconds)])
