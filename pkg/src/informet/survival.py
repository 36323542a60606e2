"""Kaplan-Meier curves and the two-group log-rank test."""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.stats import chi2

from .errors import DataError, NoEventsError, NumericalError


@dataclass(frozen=True)
class SurvivalRecord:
    """One subject: follow-up time, whether the event was observed, group label."""

    time: float
    event: bool
    group: int = 0


@dataclass(frozen=True)
class SurvivalCurve:
    """Product-limit step function, starting at probability 1 at time 0."""

    times: NDArray
    survival: NDArray


@dataclass(frozen=True)
class LogRankResult:
    statistic: float
    p_value: float


def _validate(records) -> tuple:
    times = np.array([r.time for r in records], dtype=float)
    events = np.array([r.event for r in records], dtype=bool)
    if times.size == 0:
        raise DataError("no survival records given")
    if np.any(times < 0.0) or not np.all(np.isfinite(times)):
        raise DataError("survival times must be finite and nonnegative")
    return times, events


def kaplan_meier(records, group=None) -> SurvivalCurve:
    """Kaplan-Meier estimate of the survival function.

    When ``group`` is given, only records with that group label enter the
    estimate. At each distinct event time ``t`` with ``d`` events among
    ``n`` subjects still at risk, the survival probability is multiplied
    by ``1 - d/n``; censored subjects leave the risk set after their
    censoring time.
    """
    if group is not None:
        records = [r for r in records if r.group == group]
        if not records:
            raise DataError(f"no records in group {group!r}")
    times, events = _validate(records)
    event_times = np.unique(times[events])
    steps = [0.0]
    probs = [1.0]
    surv = 1.0
    for t in event_times:
        at_risk = int(np.sum(times >= t))
        deaths = int(np.sum(events & (times == t)))
        surv *= 1.0 - deaths / at_risk
        steps.append(float(t))
        probs.append(surv)
    return SurvivalCurve(times=np.array(steps), survival=np.array(probs))


def logrank_test(records) -> LogRankResult:
    """Two-group log-rank test.

    Pools the distinct event times of both groups; at each, the observed
    number of group-one events is compared with its expectation under the
    hypergeometric null, and the squared standardized sum is referred to a
    chi-square distribution with one degree of freedom. Tied events are
    handled simultaneously; subjects censored exactly at an event time
    count as at risk for that event.
    """
    times, events = _validate(records)
    groups = np.array([r.group for r in records])
    labels = np.unique(groups)
    if labels.size != 2:
        raise DataError(
            f"log-rank test needs exactly two groups, got {labels.size}"
        )
    if not events.any():
        raise NoEventsError("no observed events; the test is undefined")
    in_one = groups == labels[1]

    event_times = np.unique(times[events])
    # Risk-set sizes at each event time via sorted search:
    # at risk = number of subjects with time >= t.
    sorted_all = np.sort(times)
    sorted_one = np.sort(times[in_one])
    n_tot = times.size - np.searchsorted(sorted_all, event_times, side="left")
    n_one = in_one.sum() - np.searchsorted(sorted_one, event_times, side="left")

    sorted_ev = np.sort(times[events])
    sorted_ev_one = np.sort(times[events & in_one])
    d_tot = (np.searchsorted(sorted_ev, event_times, side="right")
             - np.searchsorted(sorted_ev, event_times, side="left"))
    d_one = (np.searchsorted(sorted_ev_one, event_times, side="right")
             - np.searchsorted(sorted_ev_one, event_times, side="left"))

    frac = n_one / n_tot
    expected = d_tot * frac
    with np.errstate(invalid="ignore", divide="ignore"):
        variance = np.where(
            n_tot > 1,
            d_tot * frac * (1.0 - frac) * (n_tot - d_tot) / (n_tot - 1.0),
            0.0,
        )
    total_var = float(variance.sum())
    observed_minus_expected = float((d_one - expected).sum())
    if total_var <= 0.0:
        if observed_minus_expected == 0.0:
            return LogRankResult(statistic=0.0, p_value=1.0)
        raise NumericalError(
            "log-rank variance is zero; the groups are never at risk together"
        )
    statistic = observed_minus_expected ** 2 / total_var
    p_value = float(chi2.sf(statistic, df=1))
    return LogRankResult(statistic=float(statistic), p_value=p_value)
