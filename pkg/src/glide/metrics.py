"""Structural metrics between a predicted and a true DAG."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NodeSetMismatch
from .graphs import Dag


@dataclass(frozen=True)
class MetricReport:
    shd: int
    spurious_rate: float
    tpr: float
    missing: int
    extra: int
    reversed: int


def _check_nodes(pred: Dag, truth: Dag):
    if pred.names != truth.names:
        raise NodeSetMismatch(
            f"node sets differ: {pred.names} vs {truth.names}")


def _breakdown(pred: Dag, truth: Dag):
    _check_nodes(pred, truth)
    pe, te = set(pred.edges), set(truth.edges)
    reversed_ = {(a, b) for a, b in pe if (b, a) in te and (a, b) not in te}
    extra = {(a, b) for a, b in pe
             if (a, b) not in te and (b, a) not in te}
    missing = {(a, b) for a, b in te
               if (a, b) not in pe and (b, a) not in pe}
    return missing, extra, reversed_


def shd(pred: Dag, truth: Dag) -> int:
    """Missing + extra + reversed edges; a reversal costs 1."""
    missing, extra, reversed_ = _breakdown(pred, truth)
    return len(missing) + len(extra) + len(reversed_)


def spurious_rate(pred: Dag, truth: Dag) -> float:
    """Fraction of predicted edges absent from the true skeleton (either
    direction); 0 by convention when nothing is predicted."""
    _, extra, _ = _breakdown(pred, truth)
    if not pred.edges:
        return 0.0
    return len(extra) / len(pred.edges)


def tpr(pred: Dag, truth: Dag) -> float:
    """Fraction of true directed edges recovered exactly; 1 by convention when
    the truth has no edges."""
    _check_nodes(pred, truth)
    if not truth.edges:
        return 1.0
    return len(set(pred.edges) & set(truth.edges)) / len(truth.edges)


def metric_report(pred: Dag, truth: Dag) -> MetricReport:
    missing, extra, reversed_ = _breakdown(pred, truth)
    return MetricReport(
        shd=len(missing) + len(extra) + len(reversed_),
        spurious_rate=spurious_rate(pred, truth),
        tpr=tpr(pred, truth),
        missing=len(missing),
        extra=len(extra),
        reversed=len(reversed_),
    )
