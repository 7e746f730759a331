"""Regularizer catalog: evaluation, gradients, and proximal operators.

Five variants cover the solvers' needs:

``zero``
    No regularization.  Smooth; the prox is the identity.
``sq_frobenius``
    ``0.5 * ||V||_F^2``.  Smooth; prox is uniform shrinkage ``V / (1 + tau)``.
``l1``
    Entrywise sum of magnitudes ``sum |v_ij|``.  Prox is the complex soft
    threshold, which shrinks magnitudes and preserves phases.
``frob_ball``
    Indicator of ``||V||_F <= radius``.  Prox is radial projection,
    independent of the prox weight.
``power_ball``
    Indicator of ``||V||_F^2 <= budget`` (a transmit power cap).  Prox is
    radial projection onto the ball of radius ``sqrt(budget)``.

Indicator variants evaluate to ``math.inf`` outside the feasible set; a
tiny slack keeps projection outputs feasible under roundoff.  The
``weight`` field is the multiplier the solver applies to the raw value.
:func:`reg_eval`, :func:`reg_grad` and :func:`reg_prox` never apply it
themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import frob_norm, frob_norm_sq

__all__ = [
    "KINDS",
    "SMOOTH_KINDS",
    "NotDifferentiableError",
    "Regularizer",
    "reg_eval",
    "reg_grad",
    "reg_prox",
]

KINDS = ("zero", "sq_frobenius", "l1", "frob_ball", "power_ball")
SMOOTH_KINDS = ("zero", "sq_frobenius")

# Relative slack used when testing indicator feasibility, so that a value
# produced by the projection itself never evaluates to infinity.
_FEASIBLE_SLACK = 1e-9


class NotDifferentiableError(ValueError):
    """Gradient requested for a variant that only supports prox steps."""


@dataclass(frozen=True)
class Regularizer:
    """A tagged regularizer with its solver weight.

    ``radius`` is required for ``frob_ball`` and ``budget`` for
    ``power_ball``; neither applies to the other kinds.
    """

    kind: str
    weight: float = 1.0
    radius: float | None = None
    budget: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown regularizer kind {self.kind!r}; expected one of {KINDS}")
        if not (self.weight >= 0.0):
            raise ValueError(f"regularizer weight must be nonnegative, got {self.weight}")
        if self.kind == "frob_ball":
            if self.radius is None or not (self.radius >= 0.0):
                raise ValueError("frob_ball needs a nonnegative radius")
        elif self.radius is not None:
            raise ValueError(f"radius does not apply to kind {self.kind!r}")
        if self.kind == "power_ball":
            if self.budget is None or not (self.budget >= 0.0):
                raise ValueError("power_ball needs a nonnegative budget")
        elif self.budget is not None:
            raise ValueError(f"budget does not apply to kind {self.kind!r}")

    @classmethod
    def zero(cls) -> "Regularizer":
        return cls("zero", weight=0.0)

    @classmethod
    def squared_frobenius(cls, weight: float = 1.0) -> "Regularizer":
        return cls("sq_frobenius", weight=weight)

    @classmethod
    def entrywise_l1(cls, weight: float = 1.0) -> "Regularizer":
        return cls("l1", weight=weight)

    @classmethod
    def frobenius_ball(cls, radius: float, weight: float = 1.0) -> "Regularizer":
        return cls("frob_ball", weight=weight, radius=radius)

    @classmethod
    def power_ball(cls, budget: float, weight: float = 1.0) -> "Regularizer":
        return cls("power_ball", weight=weight, budget=budget)

    @property
    def is_smooth(self) -> bool:
        return self.kind in SMOOTH_KINDS

    def to_dict(self) -> dict:
        doc: dict = {"type": self.kind, "weight": self.weight}
        if self.radius is not None:
            doc["radius"] = self.radius
        if self.budget is not None:
            doc["budget"] = self.budget
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "Regularizer":
        if not isinstance(doc, dict):
            raise ValueError(f"regularizer spec must be an object, got {type(doc).__name__}")
        unknown = set(doc) - {"type", "weight", "radius", "budget"}
        if unknown:
            raise ValueError(f"unknown regularizer fields: {sorted(unknown)}")
        if "type" not in doc:
            raise ValueError("regularizer spec is missing the 'type' field")
        return cls(
            kind=doc["type"],
            weight=float(doc.get("weight", 1.0)),
            radius=None if doc.get("radius") is None else float(doc["radius"]),
            budget=None if doc.get("budget") is None else float(doc["budget"]),
        )


def reg_eval(spec: Regularizer, v: np.ndarray) -> float:
    """Unweighted regularizer value at ``v``; ``inf`` outside an indicator's set."""
    if spec.kind == "zero":
        return 0.0
    if spec.kind == "sq_frobenius":
        return 0.5 * frob_norm_sq(v)
    if spec.kind == "l1":
        return float(np.abs(v).sum())
    if spec.kind == "frob_ball":
        r = spec.radius
        return 0.0 if frob_norm(v) <= r + _FEASIBLE_SLACK * (1.0 + r) else math.inf
    # power_ball
    p = spec.budget
    return 0.0 if frob_norm_sq(v) <= p + _FEASIBLE_SLACK * (1.0 + p) else math.inf


def reg_grad(spec: Regularizer, v: np.ndarray) -> np.ndarray:
    """Gradient at ``v`` for the smooth variants.

    Under the ``Re tr(A^H B)`` inner product the squared-Frobenius gradient
    is ``V`` itself.  Nonsmooth variants raise
    :class:`NotDifferentiableError`; run the solver in prox mode instead.
    """
    if spec.kind == "zero":
        return np.zeros_like(v)
    if spec.kind == "sq_frobenius":
        return v
    raise NotDifferentiableError(
        f"regularizer kind {spec.kind!r} has no gradient; use the proximal z-update mode"
    )


def reg_prox(spec: Regularizer, v: np.ndarray, tau: float) -> np.ndarray:
    """Proximal map ``argmin_u tau*reg(u) + 0.5 ||u - v||_F^2``.

    ``tau`` must be positive.  For the two ball indicators the result is
    the projection of ``v`` and does not depend on ``tau``.
    """
    if not (tau > 0.0):
        raise ValueError(f"prox weight must be positive, got {tau}")
    if spec.kind == "zero":
        return v
    if spec.kind == "sq_frobenius":
        return v / (1.0 + tau)
    if spec.kind == "l1":
        mag = np.abs(v)
        scale = np.zeros_like(mag)
        nz = mag > 0.0
        scale[nz] = np.maximum(1.0 - tau / mag[nz], 0.0)
        return v * scale
    if spec.kind == "frob_ball":
        n = frob_norm(v)
        return v if n <= spec.radius else v * (spec.radius / n)
    # power_ball
    p = frob_norm_sq(v)
    return v if p <= spec.budget else v * math.sqrt(spec.budget / p)
