"""Prediction quality and cost aggregated over a batch."""

from typing import Sequence

import numpy as np

from hsvp.core.errors import EmptyBatchException, LengthMismatchException
from hsvp.models import MetricsRow, Prediction


def evaluate(preds: Sequence[Prediction], truths: Sequence[int]) -> MetricsRow:
    """Aggregate recall, set size, time and n over one solver cell.

    Recall is taken over instances whose true class is known; a truth of -1
    marks an unlabeled instance. With no labeled instance recall is None.

    Args:
        preds: Predictions of one solver at one (r, k), all with equal budgets
        truths: True class index per prediction

    Returns:
        Metrics row

    Raises:
        LengthMismatchException: If the sequences differ in length
        EmptyBatchException: If there are no predictions
    """
    if len(preds) != len(truths):
        raise LengthMismatchException(len(preds), len(truths))
    if not preds:
        raise EmptyBatchException("cannot evaluate an empty batch")

    hits = [y in p.classes for p, y in zip(preds, truths) if y >= 0]
    first = preds[0]
    return MetricsRow(
        solver=first.solver,
        r=first.budgets.r,
        k=first.budgets.k,
        recall=float(np.mean(hits)) if hits else None,
        avg_set_size=float(np.mean([len(p.classes) for p in preds])),
        avg_time_us=float(np.mean([p.time_us for p in preds])),
        avg_n=float(np.mean([p.n for p in preds])),
        instances=len(preds),
    )
