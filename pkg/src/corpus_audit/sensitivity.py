"""Break-even analysis: how far one parameter must move before the weighted
RDM lower bound falls to a target (1.0 = proportional representation).

Every other parameter stays at its lower-bound value (lowest precision,
highest coverage, highest base rate). The pipeline is linear in each
parameter, so a closed form exists; it is kept as a cross-check while the
solver itself bisects, which stays valid if a future pipeline variant is not
linear.
"""
from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import asdict, dataclass, replace
from typing import Any

from corpus_audit.errors import ContractViolation
from corpus_audit.estimator import DatasetStats, EstimationParams, estimate_dataset, total, weighted_total

PARAMETERS = ("precision", "coverage", "base_rate")
# sign of d(rdm)/d(parameter)
DIRECTION = {"precision": 1, "coverage": -1, "base_rate": -1}
SEARCH_DOMAIN = (1e-6, 1 - 1e-6)
SOLVER_TOL = 1e-9


@dataclass(frozen=True)
class BreakEvenResult:
    parameter: str
    break_even_value: float
    target_rdm: float
    held_parameters: dict[str, Any]
    total_at_break_even: float
    weighted_total_at_break_even: float
    closed_form_value: float
    iterations: int

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> BreakEvenResult:
        return cls(**d)


def lower_bound_values(params: EstimationParams) -> dict[str, float]:
    return {
        "precision": params.frame.precision_range[0],
        "coverage": params.frame.coverage_range[1],
        "base_rate": params.base_rate_range[1],
    }


def with_override(params: EstimationParams, parameter: str, value: float) -> EstimationParams:
    """Replace one parameter's interval with the degenerate interval [value, value]."""
    if parameter not in PARAMETERS:
        raise ContractViolation(f"unknown parameter {parameter!r}; expected one of {PARAMETERS}")
    if not 0.0 < value < 1.0:
        raise ContractViolation(f"override value must be in (0, 1), got {value}")
    if parameter == "precision":
        return replace(params, frame=replace(params.frame, precision_range=(value, value)))
    if parameter == "coverage":
        return replace(params, frame=replace(params.frame, coverage_range=(value, value)))
    return replace(params, base_rate_range=(value, value))


def _weights(stats: Sequence[DatasetStats], weights: Mapping[str, float] | None) -> Mapping[str, float]:
    return weights if weights is not None else {s.dataset_id: s.weight for s in stats}


def rdm_at(
    stats: Sequence[DatasetStats],
    params: EstimationParams,
    weights: Mapping[str, float] | None = None,
    override: tuple[str, float] | None = None,
) -> tuple[float, float]:
    """(total, weighted total) RDM lower bounds with one parameter overridden."""
    if override is not None:
        params = with_override(params, *override)
    estimates = [estimate_dataset(s, params) for s in stats]
    return total(estimates).rdm_range.lo, weighted_total(estimates, _weights(stats, weights)).rdm_range.lo


def closed_form_break_even(
    stats: Sequence[DatasetStats],
    params: EstimationParams,
    weights: Mapping[str, float] | None,
    parameter: str,
    target: float = 1.0,
) -> float:
    held = lower_bound_values(params)
    _, weighted = rdm_at(stats, params, weights)
    if DIRECTION[parameter] > 0:
        return held[parameter] * target / weighted
    return held[parameter] * weighted / target


def break_even(
    stats: Sequence[DatasetStats],
    params: EstimationParams,
    weights: Mapping[str, float] | None,
    parameter: str,
    target: float = 1.0,
    tol: float = SOLVER_TOL,
) -> BreakEvenResult:
    if parameter not in PARAMETERS:
        raise ContractViolation(f"unknown parameter {parameter!r}; expected one of {PARAMETERS}")
    if not target > 0:
        raise ContractViolation(f"target RDM must be positive, got {target}")

    def gap(v: float) -> float:
        return rdm_at(stats, params, weights, (parameter, v))[1] - target

    lo, hi = SEARCH_DOMAIN
    g_lo, g_mid, g_hi = gap(lo), gap((lo + hi) / 2), gap(hi)
    sign = DIRECTION[parameter]
    if not (sign * (g_mid - g_lo) > 0 and sign * (g_hi - g_mid) > 0):
        raise ContractViolation(f"weighted RDM is not monotone in {parameter} over {SEARCH_DOMAIN}")
    if g_lo * g_hi > 0:
        raise ContractViolation(f"target RDM {target} is not bracketed by {parameter} in {SEARCH_DOMAIN}")

    iterations = 0
    mid = (lo + hi) / 2
    while iterations < 200:
        iterations += 1
        mid = (lo + hi) / 2
        g = gap(mid)
        if abs(g) < tol or hi - lo < 1e-15:
            break
        if (g < 0) == (sign > 0):
            lo = mid
        else:
            hi = mid

    tot, wtot = rdm_at(stats, params, weights, (parameter, mid))
    return BreakEvenResult(
        parameter=parameter,
        break_even_value=mid,
        target_rdm=target,
        held_parameters={
            **lower_bound_values(params),
            "us_fraction": {s.dataset_id: params.us_fraction_for(s.dataset_id) for s in stats},
        },
        total_at_break_even=tot,
        weighted_total_at_break_even=wtot,
        closed_form_value=closed_form_break_even(stats, params, weights, parameter, target),
        iterations=iterations,
    )


def break_even_all(
    stats: Sequence[DatasetStats],
    params: EstimationParams,
    weights: Mapping[str, float] | None = None,
    target: float = 1.0,
) -> list[BreakEvenResult]:
    return [break_even(stats, params, weights, p, target) for p in PARAMETERS]
