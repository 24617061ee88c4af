"""Set-prediction losses and referent matching, desk scale.

Masks are logits over (T, H, W) per query; boxes are (cx, cy, w, h) in [0, 1]
per frame. A single ground-truth referent exists, so bipartite matching
degenerates to an argmin over the per-query cost column; it still runs through
the assignment solver so the tie-break contract is shared.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import as_array, hungarian, log_softmax_stable, softmax_stable

__all__ = [
    "LossWeights",
    "Prediction",
    "GroundTruth",
    "LossBreakdown",
    "segmentation_losses",
    "box_losses",
    "match_referent",
    "pseudo_rrl",
    "pseudo_rrl_grad",
    "total_loss",
]

DICE_EPS = 1e-6


@dataclass(frozen=True)
class LossWeights:
    reason: float = 2.0
    mask: float = 2.0
    dice: float = 5.0
    giou: float = 2.0
    l1: float = 2.0

    def __post_init__(self):
        for name in ("reason", "mask", "dice", "giou", "l1"):
            if getattr(self, name) < 0:
                raise ValueError(f"lambda_{name} must be nonnegative")


@dataclass(frozen=True)
class Prediction:
    mask_logits: np.ndarray  # (T, H, W)
    boxes: np.ndarray  # (T, 4) as cxcywh

    def __post_init__(self):
        if self.mask_logits.ndim != 3:
            raise ValueError("mask logits must be (T, H, W)")
        if self.boxes.shape != (self.mask_logits.shape[0], 4):
            raise ValueError("boxes must be (T, 4) matching the mask frames")
        if np.any(self.boxes[:, 2:] <= 0):
            raise ValueError("box width/height must be positive")


@dataclass(frozen=True)
class GroundTruth:
    mask: np.ndarray  # (T, H, W) in {0, 1}
    boxes: np.ndarray  # (T, 4) as cxcywh

    def __post_init__(self):
        values = np.unique(self.mask)
        if not np.all(np.isin(values, (0.0, 1.0))):
            raise ValueError("ground-truth mask must be binary")


def segmentation_losses(pred_logits: np.ndarray, gt_mask: np.ndarray) -> tuple[float, float]:
    """(mean binary cross-entropy, soft dice loss) over the whole volume."""
    logits = as_array(pred_logits, name="mask logits")
    gt = as_array(gt_mask, name="ground-truth mask")
    if logits.shape != gt.shape:
        raise ValueError(f"shape mismatch: {logits.shape} vs {gt.shape}")
    # Stable BCE on logits: max(x,0) - x*g + log(1 + exp(-|x|))
    bce = float(
        np.mean(np.maximum(logits, 0.0) - logits * gt + np.log1p(np.exp(-np.abs(logits))))
    )
    p = 1.0 / (1.0 + np.exp(-logits))
    dice = 1.0 - 2.0 * float((p * gt).sum()) / (float(p.sum()) + float(gt.sum()) + DICE_EPS)
    return bce, dice


def _cxcywh_to_xyxy(box: np.ndarray) -> np.ndarray:
    cx, cy, w, h = box
    return np.array([cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2])


def box_losses(pred_box, gt_box) -> tuple[float, float]:
    """(GIoU loss, L1 loss) for one cxcywh box pair."""
    pred = as_array(pred_box, name="pred box").reshape(4)
    gt = as_array(gt_box, name="gt box").reshape(4)
    if gt[2] <= 0 or gt[3] <= 0:
        raise ValueError("degenerate ground-truth box")
    if pred[2] <= 0 or pred[3] <= 0:
        raise ValueError("degenerate predicted box")
    a = _cxcywh_to_xyxy(pred)
    b = _cxcywh_to_xyxy(gt)
    inter_w = max(0.0, min(a[2], b[2]) - max(a[0], b[0]))
    inter_h = max(0.0, min(a[3], b[3]) - max(a[1], b[1]))
    inter = inter_w * inter_h
    area_a = (a[2] - a[0]) * (a[3] - a[1])
    area_b = (b[2] - b[0]) * (b[3] - b[1])
    union = area_a + area_b - inter
    hull_w = max(a[2], b[2]) - min(a[0], b[0])
    hull_h = max(a[3], b[3]) - min(a[1], b[1])
    hull = hull_w * hull_h
    giou = inter / union - (hull - union) / hull
    l1 = float(np.abs(pred - gt).sum())
    return 1.0 - giou, l1


@dataclass(frozen=True)
class LossBreakdown:
    bce: float
    dice: float
    giou: float
    l1: float


def prediction_losses(pred: Prediction, gt: GroundTruth) -> LossBreakdown:
    """Per-query aggregate: volume BCE/dice plus frame-averaged box losses."""
    bce, dice = segmentation_losses(pred.mask_logits, gt.mask)
    giou_sum = 0.0
    l1_sum = 0.0
    frames = pred.boxes.shape[0]
    for t in range(frames):
        g, l = box_losses(pred.boxes[t], gt.boxes[t])
        giou_sum += g
        l1_sum += l
    return LossBreakdown(bce=bce, dice=dice, giou=giou_sum / frames, l1=l1_sum / frames)


def match_referent(
    preds: list[Prediction], gt: GroundTruth, weights: LossWeights
) -> tuple[int, list[LossBreakdown]]:
    """Index of the query whose prediction best matches the referent.

    The matching cost is the weighted sum of the four prediction losses; the
    assignment solver on the (num queries x 1) column resolves ties toward
    the smallest index.
    """
    if not preds:
        raise ValueError("at least one query prediction is required")
    breakdowns = [prediction_losses(p, gt) for p in preds]
    costs = np.array(
        [
            [
                weights.mask * b.bce
                + weights.dice * b.dice
                + weights.giou * b.giou
                + weights.l1 * b.l1
            ]
            for b in breakdowns
        ]
    )
    assignment = hungarian(costs)
    return assignment.pairs[0][0], breakdowns


def pseudo_rrl(root_scores: np.ndarray, matched: int) -> float:
    """Cross-entropy of softmax(root scores) against one-hot at the match."""
    scores = as_array(root_scores, name="root scores")
    if not (0 <= matched < scores.size):
        raise ValueError(f"matched index {matched} out of range")
    return -float(log_softmax_stable(scores)[matched])


def pseudo_rrl_grad(root_scores: np.ndarray, matched: int) -> np.ndarray:
    """d pseudo_rrl / d scores = softmax(scores) - onehot(matched)."""
    grad = softmax_stable(root_scores)
    grad[matched] -= 1.0
    return grad


def total_loss(
    reason: float,
    breakdown: LossBreakdown,
    weights: LossWeights = LossWeights(),
) -> float:
    return (
        weights.reason * reason
        + weights.mask * breakdown.bce
        + weights.dice * breakdown.dice
        + weights.giou * breakdown.giou
        + weights.l1 * breakdown.l1
    )
