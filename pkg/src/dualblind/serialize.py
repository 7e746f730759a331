"""JSON serialization for problem instances.

The container format (``"format": "jrc-instance/1"``) stores every matrix
as an object with an explicit ``shape`` and a row-major ``data`` list of
``[re, im]`` pairs, so files are self-describing and loadable from any
language.  Floats round-trip exactly through Python's JSON repr, which
makes save/load bit-exact.
"""

from __future__ import annotations

import json

import numpy as np

from .jrc import GroundTruth, JrcInstance
from .linalg import as_matrix
from .regularizers import Regularizer

__all__ = [
    "FORMAT_TAG",
    "matrix_to_obj",
    "matrix_from_obj",
    "instance_to_dict",
    "instance_from_dict",
    "save_instance",
    "load_instance",
]

FORMAT_TAG = "jrc-instance/1"


def matrix_to_obj(m: np.ndarray) -> dict:
    """Encode a complex matrix as ``{"shape": [r, c], "data": [[re, im], ...]}``."""
    flat = m.reshape(-1)
    return {
        "shape": [int(m.shape[0]), int(m.shape[1])],
        "data": [[float(v.real), float(v.imag)] for v in flat],
    }


def matrix_from_obj(obj: dict, name: str = "matrix") -> np.ndarray:
    """Decode and validate a matrix object."""
    if not isinstance(obj, dict) or "shape" not in obj or "data" not in obj:
        raise ValueError(f"{name} must be an object with 'shape' and 'data'")
    rows, cols = (int(v) for v in obj["shape"])
    data = obj["data"]
    if len(data) != rows * cols:
        raise ValueError(f"{name} has {len(data)} entries, expected {rows * cols}")
    values = [complex(re, im) for re, im in data]
    return as_matrix(np.array(values, dtype=np.complex128).reshape(rows, cols), name)


def instance_to_dict(instance: JrcInstance, master_seed: int | None = None) -> dict:
    doc: dict = {
        "format": FORMAT_TAG,
        "master_seed": master_seed,
        "lambda_radar": instance.lambda_radar,
        "lambda_comm": instance.lambda_comm,
        "noise_var": instance.noise_var,
        "reg_channel": instance.reg_channel.to_dict(),
        "reg_signal": instance.reg_signal.to_dict(),
        "y_radar": matrix_to_obj(instance.y_radar),
        "y_comm": matrix_to_obj(instance.y_comm),
        "h_comm": matrix_to_obj(instance.h_comm),
        "g_nominal": None if instance.g_nominal is None else matrix_to_obj(instance.g_nominal),
        "ground_truth": None,
    }
    if instance.ground_truth is not None:
        gt = instance.ground_truth
        doc["ground_truth"] = {
            "g_true": matrix_to_obj(gt.g_true),
            "x_true": matrix_to_obj(gt.x_true),
            "delta_g": None if gt.delta_g is None else matrix_to_obj(gt.delta_g),
        }
    return doc


def instance_from_dict(doc: dict) -> JrcInstance:
    if not isinstance(doc, dict):
        raise ValueError(f"instance document must be an object, got {type(doc).__name__}")
    tag = doc.get("format")
    if tag != FORMAT_TAG:
        raise ValueError(f"unsupported instance format {tag!r}, expected {FORMAT_TAG!r}")
    ground_truth = None
    if doc.get("ground_truth") is not None:
        gt = doc["ground_truth"]
        ground_truth = GroundTruth(
            g_true=matrix_from_obj(gt["g_true"], "g_true"),
            x_true=matrix_from_obj(gt["x_true"], "x_true"),
            delta_g=None if gt.get("delta_g") is None else matrix_from_obj(gt["delta_g"], "delta_g"),
        )
    return JrcInstance(
        y_radar=matrix_from_obj(doc["y_radar"], "y_radar"),
        y_comm=matrix_from_obj(doc["y_comm"], "y_comm"),
        h_comm=matrix_from_obj(doc["h_comm"], "h_comm"),
        g_nominal=None if doc.get("g_nominal") is None else matrix_from_obj(doc["g_nominal"], "g_nominal"),
        lambda_radar=float(doc.get("lambda_radar", 1.0)),
        lambda_comm=float(doc.get("lambda_comm", 1.0)),
        reg_channel=Regularizer.from_dict(doc["reg_channel"]),
        reg_signal=Regularizer.from_dict(doc["reg_signal"]),
        noise_var=float(doc.get("noise_var", 1e-3)),
        ground_truth=ground_truth,
    )


def save_instance(instance: JrcInstance, path, master_seed: int | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(instance_to_dict(instance, master_seed), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_instance(path) -> JrcInstance:
    with open(path) as fh:
        return instance_from_dict(json.load(fh))
