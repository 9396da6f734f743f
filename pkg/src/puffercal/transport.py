"""Comonotone couplings of discrete distributions and their transport functionals.

In one dimension the quantile-aligned (north-west) coupling minimizes the
expected cost for every convex function of the displacement, so all
calibration functionals in this package are evaluated on that single plan.
"""

import math
from dataclasses import dataclass
from typing import Callable

from scipy.special import logsumexp

from .dist import DiscreteDistribution
from .errors import FunctionalOverflow, InvalidValue

_MASS_TOL = 1e-12


@dataclass(frozen=True)
class Coupling:
    """Finite transport plan: (source atom, target atom, mass) triples.

    Entries are lexicographically sorted and comonotone: the target atoms
    never decrease as the source atoms increase.
    """

    entries: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        if not self.entries:
            raise InvalidValue("coupling needs at least one entry")
        total = math.fsum(m for _, _, m in self.entries)
        if abs(total - 1.0) > _MASS_TOL:
            raise InvalidValue(f"coupling mass sums to {total!r}, expected 1")
        prev = None
        for entry in self.entries:
            x, x2, m = entry
            if not (m > 0.0 and math.isfinite(m)):
                raise InvalidValue(f"coupling mass {m!r} is not strictly positive")
            if prev is not None:
                if entry[:2] < prev[:2]:
                    raise InvalidValue("coupling entries are not sorted")
                if x >= prev[0] and x2 < prev[1]:
                    raise InvalidValue("coupling support is not comonotone")
            prev = entry

    def displacements(self) -> list[float]:
        return [abs(x - x2) for x, x2, _ in self.entries]

    def max_displacement(self) -> float:
        return max(self.displacements())

    def marginals(self) -> tuple[dict[float, float], dict[float, float]]:
        """Accumulated (row, column) marginals, keyed by atom."""
        first: dict[float, float] = {}
        second: dict[float, float] = {}
        for x, x2, m in self.entries:
            first[x] = first.get(x, 0.0) + m
            second[x2] = second.get(x2, 0.0) + m
        return first, second


def monotone_coupling(P: DiscreteDistribution, Q: DiscreteDistribution) -> Coupling:
    """Quantile-aligned coupling of two sorted discrete distributions.

    Sweeps both cumulative-mass ladders once, pairing the mass between
    consecutive cumulative levels. Optimal for every convex cost of the
    displacement |x - x'|; ties in cumulative levels advance both sides.
    """
    cum_p = []
    acc = 0.0
    for m in P.masses:
        acc += m
        cum_p.append(acc)
    cum_q = []
    acc = 0.0
    for m in Q.masses:
        acc += m
        cum_q.append(acc)

    entries = []
    i = j = 0
    level_prev = 0.0
    while i < len(cum_p) and j < len(cum_q):
        level = min(cum_p[i], cum_q[j])
        mass = level - level_prev
        if mass > 0.0:
            entries.append((P.atoms[i], Q.atoms[j], mass))
        level_prev = level
        if cum_p[i] <= level:
            i += 1
        if cum_q[j] <= level:
            j += 1
    return Coupling(entries=tuple(entries))


def coupling_expectation(plan: Coupling, g: Callable[[float], float]) -> float:
    """Expectation of g(|x - x'|) under the plan, with compensated summation.

    Raises FunctionalOverflow when g overflows; the caller should retry
    with a larger noise parameter (which shrinks the exponent).
    """
    terms = []
    for x, x2, mass in plan.entries:
        try:
            value = g(abs(x - x2))
        except OverflowError as exc:
            raise FunctionalOverflow(f"g overflowed at displacement {abs(x - x2)!r}") from exc
        if not math.isfinite(value):
            raise FunctionalOverflow(f"g({abs(x - x2)!r}) = {value!r}")
        terms.append(value * mass)
    total = math.fsum(terms)
    if not math.isfinite(total):
        raise FunctionalOverflow("transport functional overflowed")
    return total


def coupling_log_expectation(plan: Coupling, log_g: Callable[[float], float]) -> float:
    """log E[exp(log_g(|x - x'|))] under the plan, computed by log-sum-exp.

    Safe replacement for coupling_expectation when the integrand is a large
    exponential (e.g. extreme divergence orders).
    """
    logs = [
        math.log(mass) + log_g(abs(x - x2)) for x, x2, mass in plan.entries
    ]
    return float(logsumexp(logs))


def w_infinity(P: DiscreteDistribution, Q: DiscreteDistribution) -> float:
    """Worst-case displacement of the quantile-aligned coupling.

    The comonotone plan minimizes the support supremum of |x - x'| in one
    dimension, so this is the minimal worst-case transport distance.
    """
    return monotone_coupling(P, Q).max_displacement()
