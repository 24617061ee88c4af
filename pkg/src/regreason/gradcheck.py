"""Verification of the analytic backward pass against central differences.

Each trial builds a random scoring instance plus random mask/box predictions,
evaluates the full training loss, and compares the hand-derived gradients for
every parameter group with finite differences of the same loss.
"""

from __future__ import annotations

from dataclasses import dataclass, replace as dc_replace

import numpy as np

from .losses import (
    LossWeights,
    match_referent,
    pseudo_rrl,
    pseudo_rrl_grad,
    total_loss,
)
from .numerics import finite_diff_grad, relative_error
from .synth import ScoringInstance, random_instance, random_predictions, rng_for
from .tcrr import referring_distribution, run_tcrr, tcrr_backward

__all__ = ["GradCheckResult", "loss_and_grads", "run_gradcheck", "GROUPS"]

GROUPS = ("w_r", "omega_r", "w_e", "omega_e", "C", "R", "O")

DEFAULT_TOLERANCE = 1e-4
DEFAULT_EPS = 1e-4


@dataclass
class GradCheckResult:
    trials: int
    max_rel_err: dict[str, float]
    tolerance: float
    loss_reports: list[dict]

    @property
    def ok(self) -> bool:
        return all(err <= self.tolerance for err in self.max_rel_err.values())


def _loss_for_instance(inst: ScoringInstance, matched: int, weights: LossWeights,
                       fixed_components) -> float:
    forward = run_tcrr(inst.features, inst.schedule, inst.bundles, inst.params)
    reason = pseudo_rrl(forward.table.scores[inst.reg.root], matched)
    return total_loss(reason, fixed_components, weights)


def loss_and_grads(
    inst: ScoringInstance, matched: int, weights: LossWeights, fixed_components
) -> tuple[float, dict[str, np.ndarray]]:
    """Training loss and its analytic gradients wrt the reasoning inputs."""
    forward = run_tcrr(inst.features, inst.schedule, inst.bundles, inst.params)
    root_row = forward.table.scores[inst.reg.root]
    reason = pseudo_rrl(root_row, matched)
    loss = total_loss(reason, fixed_components, weights)

    upstream = np.zeros_like(forward.table.scores)
    upstream[inst.reg.root] = weights.reason * pseudo_rrl_grad(root_row, matched)
    grads = tcrr_backward(forward, upstream)
    return loss, grads


def _with_param(inst: ScoringInstance, group: str, value: np.ndarray) -> ScoringInstance:
    if group in ("w_r", "omega_r", "w_e", "omega_e"):
        params = dc_replace(inst.params, **{group: value})
        return dc_replace(inst, params=params)
    if group == "C":
        return dc_replace(inst, features=dc_replace(inst.features, C=value))
    if group == "R":
        return dc_replace(inst, features=dc_replace(inst.features, R=value))
    if group == "O":
        bundles = [dc_replace(b, video_feat=value[i]) for i, b in enumerate(inst.bundles)]
        return dc_replace(inst, bundles=bundles)
    raise KeyError(group)


def _get_param(inst: ScoringInstance, group: str) -> np.ndarray:
    if group in ("w_r", "omega_r", "w_e", "omega_e"):
        return getattr(inst.params, group)
    if group == "C":
        return inst.features.C
    if group == "R":
        return inst.features.R
    if group == "O":
        return np.stack([b.video_feat for b in inst.bundles])
    raise KeyError(group)


def run_gradcheck(
    trials: int = 50,
    seed: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
    eps: float = DEFAULT_EPS,
    corrupt: bool = False,
) -> GradCheckResult:
    """Compare analytic and finite-difference gradients over seeded trials.

    `corrupt` deliberately perturbs one analytic gradient so the harness
    itself can be shown to catch a wrong backward pass.
    """
    worst = {g: 0.0 for g in GROUPS}
    reports: list[dict] = []
    for trial in range(trials):
        inst = random_instance(seed=seed + trial, max_nodes=8, num_queries=4, per_frame=3,
                               frames=3, d=6)
        rng = rng_for(seed + trial, 0xFACE)
        preds, gt = random_predictions(rng, num_queries=4, frames=3, hw=8)
        weights = LossWeights()
        matched, breakdowns = match_referent(preds, gt, weights)
        components = breakdowns[matched]

        loss, grads = loss_and_grads(inst, matched, weights, components)
        forward = run_tcrr(inst.features, inst.schedule, inst.bundles, inst.params)
        _, referent = referring_distribution(forward.table, inst.reg.root)
        reports.append(
            {
                "trial": trial,
                "matched": matched,
                "referent": referent,
                "bce": components.bce,
                "dice": components.dice,
                "giou": components.giou,
                "l1": components.l1,
                "reason": pseudo_rrl(forward.table.scores[inst.reg.root], matched),
                "total": loss,
            }
        )
        if corrupt:
            grads["omega_r"] = grads["omega_r"] + 0.05

        for group in GROUPS:
            base = _get_param(inst, group).copy()

            def f(x, group=group):
                return _loss_for_instance(
                    _with_param(inst, group, x.reshape(base.shape)),
                    matched,
                    weights,
                    components,
                )

            numeric = finite_diff_grad(f, base, eps=eps)
            err = relative_error(grads[group], numeric)
            worst[group] = max(worst[group], err)
    return GradCheckResult(
        trials=trials, max_rel_err=worst, tolerance=tolerance, loss_reports=reports
    )
