"""Audit report container and the two pass conventions.

Explicit-constant audits compare a measured left side against a closed
form right side at a fixed relative tolerance.  Empirical-constant
audits have no usable literal constant; they extract one from samples
and pass on finiteness plus stability under one grid refinement.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BoundReport",
    "pair_samples",
    "explicit_report",
    "vacuous_report",
    "empirical_report",
    "EXPLICIT_TOL",
    "STABILITY_FACTOR",
]

EXPLICIT_TOL = 1e-6
STABILITY_FACTOR = 1.25


@dataclass
class BoundReport:
    bound_id: str
    scenario: str
    samples: list
    passed: bool
    margin: float
    empirical_constant: float | None = None
    shape_exponents: dict | None = None
    notes: dict = field(default_factory=dict)

    @property
    def vacuous(self) -> bool:
        return bool(self.notes.get("vacuous", False))

    def row(self) -> dict:
        """Flat CSV row."""
        return {
            "bound_id": self.bound_id,
            "scenario": self.scenario,
            "n_samples": len(self.samples),
            "empirical_constant": _num(self.empirical_constant),
            "margin": _num(self.margin),
            "pass": self.passed,
            "notes": json.dumps(self.notes, sort_keys=True, separators=(",", ":")),
        }

    def to_dict(self) -> dict:
        return {
            "bound_id": self.bound_id,
            "scenario": self.scenario,
            "n_samples": len(self.samples),
            "samples": self.samples,
            "empirical_constant": _num(self.empirical_constant),
            "shape_exponents": self.shape_exponents,
            "margin": _num(self.margin),
            "pass": self.passed,
            "notes": self.notes,
        }


def _num(x):
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return None
    return x


def pair_samples(lhs, rhs, labels=None) -> list:
    """Zip lhs/rhs value arrays into sample dicts for explicit_report."""
    lhs = np.atleast_1d(np.asarray(lhs, dtype=float))
    rhs = np.atleast_1d(np.asarray(rhs, dtype=float))
    if lhs.shape != rhs.shape:
        raise ValueError("lhs and rhs sample arrays must align")
    out = []
    for i, (lo, hi) in enumerate(zip(lhs, rhs)):
        s = {"lhs": float(lo), "rhs": float(hi)}
        if labels is not None:
            s["label"] = str(labels[i])
        out.append(s)
    return out


def explicit_report(bound_id, scenario, samples, tol: float = EXPLICIT_TOL, notes=None) -> BoundReport:
    """Pass iff lhs <= rhs (1 + tol) at every sample."""
    notes = dict(notes or {})
    ok = True
    margin = math.inf
    for s in samples:
        lhs, rhs = s["lhs"], s["rhs"]
        scale = max(abs(lhs), abs(rhs), 1e-300)
        slack = (rhs - lhs) / scale
        margin = min(margin, slack)
        if lhs > rhs + tol * scale:
            ok = False
    notes.setdefault("tolerance", tol)
    return BoundReport(
        bound_id=bound_id,
        scenario=scenario,
        samples=samples,
        passed=ok,
        margin=margin if samples else math.nan,
        notes=notes,
    )


def vacuous_report(bound_id, scenario, hypothesis_margin: float, notes=None) -> BoundReport:
    """Hypothesis scan failed: nothing is asserted."""
    notes = dict(notes or {})
    notes["vacuous"] = True
    notes["hypothesis_margin"] = hypothesis_margin
    return BoundReport(
        bound_id=bound_id,
        scenario=scenario,
        samples=[],
        passed=True,
        margin=math.nan,
        notes=notes,
    )


def empirical_report(
    bound_id,
    scenario,
    samples,
    constant: float,
    refined_constant: float | None,
    extra_ok: bool = True,
    shape_exponents=None,
    notes=None,
) -> BoundReport:
    """Pass iff the constant is finite, positive, resolution-stable."""
    notes = dict(notes or {})
    ok = extra_ok and math.isfinite(constant) and constant > 0.0
    stability = None
    if refined_constant is not None:
        if math.isfinite(refined_constant) and refined_constant > 0:
            stability = abs(math.log(constant) - math.log(refined_constant))
            ok = ok and stability <= math.log(STABILITY_FACTOR)
        else:
            ok = False
        notes["refined_constant"] = refined_constant
    if stability is not None:
        notes["stability_log_gap"] = stability
    return BoundReport(
        bound_id=bound_id,
        scenario=scenario,
        samples=samples,
        passed=ok,
        margin=stability if stability is not None else math.nan,
        empirical_constant=constant,
        shape_exponents=shape_exponents,
        notes=notes,
    )
