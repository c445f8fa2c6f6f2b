"""EER and minimum normalised DCF over bonafide/spoof scores.

Higher scores mean "more bonafide". At threshold ``theta`` a spoof trial is
falsely accepted when ``score >= theta`` and a bonafide trial is missed when
``score < theta``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputFormatError, SingleClassError

BONAFIDE = "bonafide"
SPOOF = "spoof"


@dataclass(frozen=True)
class ScoreSet:
    scores: np.ndarray
    is_bonafide: np.ndarray  # bool, aligned with scores

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64).reshape(-1)
        labels = np.asarray(self.is_bonafide, dtype=bool).reshape(-1)
        if scores.shape != labels.shape:
            raise ValueError("scores and labels differ in length")
        if not np.all(np.isfinite(scores)):
            raise ValueError("scores must be finite")
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "is_bonafide", labels)

    @classmethod
    def from_lists(cls, bonafide, spoof) -> "ScoreSet":
        bonafide = np.asarray(bonafide, dtype=np.float64)
        spoof = np.asarray(spoof, dtype=np.float64)
        labels = np.concatenate([np.ones(bonafide.size, bool), np.zeros(spoof.size, bool)])
        return cls(np.concatenate([bonafide, spoof]), labels)

    @property
    def bonafide(self) -> np.ndarray:
        return self.scores[self.is_bonafide]

    @property
    def spoof(self) -> np.ndarray:
        return self.scores[~self.is_bonafide]

    def require_both(self) -> None:
        if not self.is_bonafide.any() or self.is_bonafide.all():
            raise SingleClassError("need at least one bonafide and one spoof score")


def det_points(s: ScoreSet):
    """Operating points over every distinct score plus a reject-all threshold.

    Returns ``(thresholds, p_fa, p_miss)``, thresholds ascending and ending in
    ``+inf``. Rates are step functions of the threshold that only change at
    observed scores, so this set covers every attainable operating point.
    """
    s.require_both()
    bona = np.sort(s.bonafide)
    spoof = np.sort(s.spoof)
    thresholds = np.append(np.unique(s.scores), np.inf)
    p_miss = np.searchsorted(bona, thresholds, side="left") / bona.size
    p_fa = 1.0 - np.searchsorted(spoof, thresholds, side="left") / spoof.size
    return thresholds, p_fa, p_miss


def compute_eer(s: ScoreSet):
    """``(eer, threshold)``, linearly interpolated where the two error rates cross."""
    thr, p_fa, p_miss = det_points(s)
    gap = p_fa - p_miss
    i = int(np.argmax(gap <= 0.0))
    if gap[i] == 0.0 or i == 0:
        return float(p_fa[i]), float(thr[i])
    w = gap[i - 1] / (gap[i - 1] - gap[i])
    eer = p_fa[i - 1] + w * (p_fa[i] - p_fa[i - 1])
    if np.isfinite(thr[i]):
        theta = thr[i - 1] + w * (thr[i] - thr[i - 1])
    else:
        theta = thr[i - 1]
    return float(eer), float(theta)


def compute_min_dcf(
    s: ScoreSet,
    pi_spoof: float = 0.05,
    c_miss: float = 1.0,
    c_fa: float = 10.0,
) -> float:
    """Minimum over thresholds of the normalised detection cost.

    ``DCF = c_miss (1 - pi) P_miss + c_fa pi P_fa``, divided by
    ``min(c_miss (1 - pi), c_fa pi)``, the cost of the better trivial system.
    """
    if c_miss <= 0 or c_fa <= 0:
        raise ValueError("costs must be positive")
    if not 0.0 < pi_spoof < 1.0:
        raise ValueError("pi_spoof must lie in (0, 1)")
    _, p_fa, p_miss = det_points(s)
    w_miss = c_miss * (1.0 - pi_spoof)
    w_fa = c_fa * pi_spoof
    dcf = (w_miss * p_miss + w_fa * p_fa) / min(w_miss, w_fa)
    return float(dcf.min())


def parse_score_lines(lines):
    """Parse ``<utt_id> <bonafide|spoof> <score>`` lines; ``#`` starts a comment line."""
    ids, labels, scores = [], [], []
    for lineno, line in enumerate(lines, 1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        parts = text.split()
        if len(parts) != 3:
            raise InputFormatError(f"line {lineno}: expected 3 fields, got {len(parts)}")
        utt, label, value = parts
        if label not in (BONAFIDE, SPOOF):
            raise InputFormatError(f"line {lineno}: label {label!r} is not bonafide/spoof")
        try:
            score = float(value)
        except ValueError:
            raise InputFormatError(f"line {lineno}: score {value!r} is not a number") from None
        ids.append(utt)
        labels.append(label == BONAFIDE)
        scores.append(score)
    return ids, ScoreSet(np.array(scores, dtype=np.float64), np.array(labels, dtype=bool))


def read_score_file(path):
    with open(Path(path), encoding="utf-8") as fh:
        return parse_score_lines(fh)
