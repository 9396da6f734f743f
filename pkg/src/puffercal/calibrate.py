"""Noise-parameter solvers for transport-functional privacy conditions.

Each mechanism family reduces to the same one-dimensional problem: a
transport functional over the quantile-aligned coupling is strictly
decreasing in the noise parameter, and the calibrated parameter is the
root of functional = exp((alpha - 1) * epsilon). Roots are found with a
bracketed Brent solver that returns the endpoint on the feasible side, so
the privacy inequality holds exactly at the returned parameter. All
functionals are evaluated in log space; at extreme orders (alpha ~ 1e4)
the natural-scale values overflow doubles.
"""

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

from .dist import (
    DiscreteDistribution,
    PrivacySpec,
    absolute_cost,
    check_cost_axioms,
    reciprocal_rate,
    reciprocal_rate_inverse,
)
from .errors import (
    InfeasibleEvenAtInfinity,
    InvalidValue,
    NonInvertibleRate,
    NoRoot,
    NotMonotone,
    PuffercalError,
)
from .transport import Coupling, coupling_log_expectation, monotone_coupling

_LN2 = math.log(2.0)
_EPS = 2.220446049250313e-16
_GUARANTEE_TOL = 1e-9


@dataclass(frozen=True)
class ScenarioPair:
    """Conditional data distributions for one secret pair under one prior belief."""

    p_i: DiscreteDistribution
    p_j: DiscreteDistribution
    label: str = ""


@dataclass(frozen=True)
class ScenarioSet:
    """All secret pairs (one entry per adversarial prior) to protect jointly."""

    pairs: tuple[ScenarioPair, ...]

    def __post_init__(self):
        if not self.pairs:
            raise InvalidValue("scenario set must contain at least one pair")

    def __len__(self) -> int:
        return len(self.pairs)


def scenario_set(pairs: Sequence[tuple[DiscreteDistribution, DiscreteDistribution] | ScenarioPair]) -> ScenarioSet:
    """Build a ScenarioSet from ScenarioPair objects or bare (P, Q) tuples."""
    built = []
    for k, pair in enumerate(pairs):
        if isinstance(pair, ScenarioPair):
            built.append(pair)
        else:
            p, q = pair
            built.append(ScenarioPair(p_i=p, p_j=q, label=f"pair-{k}"))
    return ScenarioSet(pairs=tuple(built))


@dataclass(frozen=True)
class CalibrationResult:
    """Solved noise parameter plus solver diagnostics.

    functional_value is the left side of the solved equation at the
    returned parameter in its natural scale (it may be inf at extreme
    orders); log_functional_value/log_target carry the overflow-safe
    pair. guarantee_side records that the sufficient-condition inequality
    holds at the returned parameter (functional <= target for orders
    above one; >= for the experimental sub-unit-order condition).
    """

    parameter: float
    mechanism: str
    functional_value: float
    log_functional_value: float
    target_value: float
    log_target: float
    iterations: int
    bracket: tuple[float, float]
    guarantee_side: bool
    binding_pair_index: int = 0
    binding_pair_label: str = ""
    no_noise_needed: bool = False
    experimental: bool = False


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class _RootSolve:
    value: float
    iterations: int
    bracket: tuple[float, float]


def _solve_decreasing(
    f: Callable[[float], float],
    target: float,
    bracket_hint: tuple[float, float],
    rel_tol: float = 1e-9,
    max_expand: int = 200,
) -> _RootSolve:
    """Root of f(x) = target for strictly decreasing f on (0, inf).

    The hint bracket is expanded geometrically until
    f(lo) >= target >= f(hi), then a Brent iteration shrinks it. The
    returned value is the bracket endpoint on the feasible side
    (f <= target), so the inequality constraint holds exactly rather
    than approximately.
    """
    lo, hi = bracket_hint
    if not (math.isfinite(lo) and math.isfinite(hi) and lo > 0.0 and hi > 0.0):
        raise InvalidValue(f"bracket hint must be positive, got {bracket_hint!r}")
    if lo > hi:
        lo, hi = hi, lo
    if lo == hi:
        hi = 2.0 * lo

    f_lo = f(lo)
    f_hi = f(hi)
    if f_lo < f_hi:
        raise NotMonotone(
            f"f({lo!r}) = {f_lo!r} < f({hi!r}) = {f_hi!r}; expected a decreasing function"
        )
    for _ in range(max_expand):
        if f_lo >= target:
            break
        lo /= 2.0
        f_lo = f(lo)
    else:
        raise NoRoot(f"f never reaches target {target!r} from above (last f = {f_lo!r})")
    for _ in range(max_expand):
        if f_hi <= target:
            break
        hi *= 2.0
        f_hi = f(hi)
    else:
        raise NoRoot(f"f never reaches target {target!r} from below (last f = {f_hi!r})")

    # Brent on g = f - target over [lo, hi] with g(lo) >= 0 >= g(hi).
    a, fa = lo, f_lo - target
    b, fb = hi, f_hi - target
    if fa == 0.0:
        return _RootSolve(value=lo, iterations=0, bracket=(lo, lo))
    if fb == 0.0:
        return _RootSolve(value=hi, iterations=0, bracket=(hi, hi))
    c, fc = a, fa
    d = e = b - a
    iterations = 0
    for _ in range(600):
        iterations += 1
        if fb * fc > 0.0:
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * _EPS * abs(b) + 0.5 * rel_tol * abs(b)
        xm = 0.5 * (c - b)
        if abs(xm) <= tol1 or fb == 0.0:
            break
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * xm * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            p = abs(p)
            if 2.0 * p < min(3.0 * xm * q - abs(tol1 * q), abs(e * q)):
                e = d
                d = p / q
            else:
                d = xm
                e = d
        else:
            d = xm
            e = d
        a, fa = b, fb
        if abs(d) > tol1:
            b += d
        else:
            b += math.copysign(tol1, xm)
        fb = f(b) - target
    else:
        raise NoRoot("Brent iteration did not converge")

    lo_out, hi_out = (b, c) if b <= c else (c, b)
    feasible = b if fb <= 0.0 else c
    return _RootSolve(value=feasible, iterations=iterations, bracket=(lo_out, hi_out))


def solve_decreasing(
    f: Callable[[float], float],
    target: float,
    bracket_hint: tuple[float, float],
    rel_tol: float = 1e-9,
) -> float:
    """Public wrapper around the bracketed decreasing-function solver."""
    return _solve_decreasing(f, target, bracket_hint, rel_tol).value


def _as_pair(pair) -> tuple[DiscreteDistribution, DiscreteDistribution]:
    if isinstance(pair, ScenarioPair):
        return pair.p_i, pair.p_j
    p, q = pair
    return p, q


def _require_order_above_one(spec: PrivacySpec, *, allow_inf: bool) -> None:
    if spec.alpha <= 1.0:
        raise InvalidValue(f"this mechanism requires alpha > 1, got {spec.alpha!r}")
    if not allow_inf and math.isinf(spec.alpha):
        raise InvalidValue("this mechanism requires a finite alpha")


def _no_noise_result(mechanism: str, log_target: float) -> CalibrationResult:
    # Diagonal coupling: the functional is identically 1, any parameter works.
    return CalibrationResult(
        parameter=0.0,
        mechanism=mechanism,
        functional_value=1.0,
        log_functional_value=0.0,
        target_value=_safe_exp(log_target),
        log_target=log_target,
        iterations=0,
        bracket=(0.0, 0.0),
        guarantee_side=True,
        no_noise_needed=True,
    )


def _solve_transport_functional(
    plan: Coupling,
    spec: PrivacySpec,
    exponent: Callable[[float, float], float],
    bracket: tuple[float, float],
    mechanism: str,
    rel_tol: float,
) -> CalibrationResult:
    """Solve log sum pi_k exp(exponent(d_k, param)) = (alpha - 1) epsilon for param."""
    log_target = (spec.alpha - 1.0) * spec.epsilon

    def log_functional(param: float) -> float:
        return coupling_log_expectation(plan, lambda d: exponent(d, param))

    solve = _solve_decreasing(log_functional, log_target, bracket, rel_tol)
    log_value = log_functional(solve.value)
    return CalibrationResult(
        parameter=solve.value,
        mechanism=mechanism,
        functional_value=_safe_exp(log_value),
        log_functional_value=log_value,
        target_value=_safe_exp(log_target),
        log_target=log_target,
        iterations=solve.iterations,
        bracket=solve.bracket,
        guarantee_side=log_value <= log_target + _GUARANTEE_TOL * max(1.0, abs(log_target)),
    )


def calibrate_laplace(pair, spec: PrivacySpec, rel_tol: float = 1e-9) -> CalibrationResult:
    """Laplace scale achieving the order-alpha condition on the optimal coupling.

    Solves sum pi_k exp(alpha d_k / b) = exp((alpha - 1) epsilon) for the
    scale b; a fully diagonal coupling returns b = 0 with the
    no-noise-needed flag. alpha = inf dispatches to the closed-form
    worst-case-displacement rule b = W_inf / epsilon.
    """
    p_i, p_j = _as_pair(pair)
    _require_order_above_one(spec, allow_inf=True)
    if math.isinf(spec.alpha):
        return calibrate_winf_laplace(pair, spec.epsilon)
    plan = monotone_coupling(p_i, p_j)
    w_max = plan.max_displacement()
    log_target = (spec.alpha - 1.0) * spec.epsilon
    if w_max == 0.0:
        return _no_noise_result("laplace", log_target)
    # The point-mass analytic solution alpha*W/((alpha-1)*eps) is feasible
    # (all displacements <= W), so it seeds the upper bracket endpoint.
    hi = spec.alpha * w_max / log_target
    lo = spec.alpha * w_max / (log_target + _LN2)
    return _solve_transport_functional(
        plan,
        spec,
        lambda d, b: spec.alpha * d / b,
        (lo, hi),
        "laplace",
        rel_tol,
    )


def calibrate_gaussian(pair, spec: PrivacySpec, rel_tol: float = 1e-9) -> CalibrationResult:
    """Gaussian sigma achieving the order-alpha condition on the optimal coupling.

    Solves sum pi_k exp(alpha (alpha - 1) d_k^2 / (2 sigma^2)) =
    exp((alpha - 1) epsilon); valid for finite alpha > 1 only.
    """
    p_i, p_j = _as_pair(pair)
    _require_order_above_one(spec, allow_inf=False)
    plan = monotone_coupling(p_i, p_j)
    w_max = plan.max_displacement()
    log_target = (spec.alpha - 1.0) * spec.epsilon
    if w_max == 0.0:
        return _no_noise_result("gaussian", log_target)
    coeff = spec.alpha * (spec.alpha - 1.0) * w_max**2 / 2.0
    hi = math.sqrt(coeff / log_target)
    lo = math.sqrt(coeff / (log_target + _LN2))
    return _solve_transport_functional(
        plan,
        spec,
        lambda d, sigma: spec.alpha * (spec.alpha - 1.0) * d**2 / (2.0 * sigma**2),
        (lo, hi),
        "gaussian",
        rel_tol,
    )


def _check_rate_map(rate: Callable[[float], float]) -> None:
    probes = (0.5, 1.0, 2.0, 4.0)
    values = []
    for theta in probes:
        v = rate(theta)
        if not (math.isfinite(v) and v > 0.0):
            raise NonInvertibleRate(f"rate({theta}) = {v!r} must be finite positive")
        values.append(v)
    for left, right in zip(values, values[1:]):
        if not left > right:
            raise NonInvertibleRate("rate map must be strictly decreasing in the parameter")


def _invert_rate(
    rate: Callable[[float], float],
    rate_inverse: Callable[[float], float] | None,
    value: float,
) -> float:
    if rate_inverse is not None:
        theta = rate_inverse(value)
        if not (math.isfinite(theta) and theta > 0.0):
            raise NonInvertibleRate(f"rate_inverse({value!r}) = {theta!r}")
        return theta
    try:
        return _solve_decreasing(rate, value, (0.5, 2.0), rel_tol=1e-12).value
    except (NoRoot, NotMonotone) as exc:
        raise NonInvertibleRate(f"could not invert rate map at {value!r}: {exc}") from exc


def calibrate_exponential(
    pair,
    spec: PrivacySpec,
    cost: Callable[[float], float] = absolute_cost,
    rate: Callable[[float], float] = reciprocal_rate,
    rate_inverse: Callable[[float], float] | None = None,
    rel_tol: float = 1e-9,
) -> CalibrationResult:
    """Exponential-mechanism parameter for a cost c and strictly decreasing rate map.

    Solves sum pi_k exp(alpha rate(theta) c(d_k)) = exp((alpha - 1) epsilon).
    With cost |z| and rate 1/theta this coincides with calibrate_laplace.
    At alpha = inf the closed form theta = rate^-1(epsilon / sup c) applies.
    The privacy guarantee additionally needs c to satisfy the triangle
    inequality; the solver itself only requires symmetric nonnegative c.
    """
    p_i, p_j = _as_pair(pair)
    _require_order_above_one(spec, allow_inf=True)
    check_cost_axioms(cost, require_triangle=False)
    _check_rate_map(rate)
    if rate_inverse is None and rate is reciprocal_rate:
        rate_inverse = reciprocal_rate_inverse

    plan = monotone_coupling(p_i, p_j)
    costs = [cost(d) for d in plan.displacements()]
    sup_cost = max(costs)
    if math.isinf(spec.alpha):
        if sup_cost == 0.0:
            result = _no_noise_result("exponential", math.log(spec.epsilon))
            return replace(result, functional_value=0.0,
                           log_functional_value=-math.inf,
                           target_value=spec.epsilon)
        theta = _invert_rate(rate, rate_inverse, spec.epsilon / sup_cost)
        bound = rate(theta) * sup_cost
        return CalibrationResult(
            parameter=theta,
            mechanism="exponential",
            functional_value=bound,
            log_functional_value=math.log(bound),
            target_value=spec.epsilon,
            log_target=math.log(spec.epsilon),
            iterations=0,
            bracket=(theta, theta),
            guarantee_side=bound <= spec.epsilon * (1.0 + _GUARANTEE_TOL),
        )

    log_target = (spec.alpha - 1.0) * spec.epsilon
    if sup_cost == 0.0:
        return _no_noise_result("exponential", log_target)
    hi = _invert_rate(rate, rate_inverse, log_target / (spec.alpha * sup_cost))
    lo = _invert_rate(rate, rate_inverse, (log_target + _LN2) / (spec.alpha * sup_cost))
    cost_by_displacement = dict(zip(plan.displacements(), costs))
    return _solve_transport_functional(
        plan,
        spec,
        lambda d, theta: spec.alpha * rate(theta) * cost_by_displacement[d],
        (min(lo, hi), max(lo, hi)),
        "exponential",
        rel_tol,
    )


def calibrate_winf_laplace(pair, epsilon: float) -> CalibrationResult:
    """Worst-case-displacement Laplace rule: scale = W_inf / epsilon (closed form)."""
    if not (math.isfinite(epsilon) and epsilon > 0.0):
        raise InvalidValue(f"epsilon must be strictly positive, got {epsilon!r}")
    p_i, p_j = _as_pair(pair)
    plan = monotone_coupling(p_i, p_j)
    w_max = plan.max_displacement()
    if w_max == 0.0:
        result = _no_noise_result("winf-laplace", math.log(epsilon))
        return replace(result, functional_value=0.0, log_functional_value=-math.inf,
                       target_value=epsilon)
    b = w_max / epsilon
    return CalibrationResult(
        parameter=b,
        mechanism="winf-laplace",
        functional_value=w_max / b,
        log_functional_value=math.log(w_max / b),
        target_value=epsilon,
        log_target=math.log(epsilon),
        iterations=0,
        bracket=(b, b),
        guarantee_side=w_max / b <= epsilon * (1.0 + _GUARANTEE_TOL),
    )


def baseline_laplace_rpp(pair, spec: PrivacySpec, rel_tol: float = 1e-9) -> CalibrationResult:
    """Prior-work Laplace baseline: worst-case displacement fed to the
    order-alpha divergence between two equal-scale Laplace densities.

    Solves (1/(alpha-1)) log( a/(2a-1) e^{(a-1)W/b} + (a-1)/(2a-1) e^{-aW/b} )
    = epsilon for b, where W is the worst-case displacement and a = alpha.
    """
    p_i, p_j = _as_pair(pair)
    _require_order_above_one(spec, allow_inf=False)
    plan = monotone_coupling(p_i, p_j)
    w_max = plan.max_displacement()
    if w_max == 0.0:
        result = _no_noise_result("baseline-laplace", math.log(spec.epsilon))
        return replace(result, functional_value=0.0, log_functional_value=-math.inf,
                       target_value=spec.epsilon)
    alpha = spec.alpha

    def divergence(b: float) -> float:
        return laplace_pair_divergence(w_max, b, alpha)

    # divergence(b) <= W/b, so b = W/eps is feasible; the matching lower
    # endpoint subtracts the weight term's worst contribution.
    hi = w_max / spec.epsilon
    lo = w_max / (spec.epsilon + _LN2 / (alpha - 1.0))
    solve = _solve_decreasing(divergence, spec.epsilon, (lo, hi), rel_tol)
    value = divergence(solve.value)
    return CalibrationResult(
        parameter=solve.value,
        mechanism="baseline-laplace",
        functional_value=value,
        log_functional_value=math.log(value) if value > 0.0 else -math.inf,
        target_value=spec.epsilon,
        log_target=math.log(spec.epsilon),
        iterations=solve.iterations,
        bracket=solve.bracket,
        guarantee_side=value <= spec.epsilon * (1.0 + _GUARANTEE_TOL),
    )


def laplace_pair_divergence(distance: float, scale: float, alpha: float) -> float:
    """Order-alpha divergence between two Laplace densities `distance` apart."""
    if distance == 0.0:
        return 0.0
    u = distance / scale
    log_mix = _log_add(
        math.log(alpha / (2.0 * alpha - 1.0)) + (alpha - 1.0) * u,
        math.log((alpha - 1.0) / (2.0 * alpha - 1.0)) - alpha * u,
    )
    return log_mix / (alpha - 1.0)


def _log_add(logx: float, logy: float) -> float:
    a, b = min(logx, logy), max(logx, logy)
    if a == -math.inf:
        return b
    return b + math.log1p(math.exp(a - b))


def baseline_gaussian_rpp(pair, spec: PrivacySpec) -> CalibrationResult:
    """Prior-work Gaussian baseline: sigma = sqrt(alpha W^2 / (2 epsilon)), closed form."""
    p_i, p_j = _as_pair(pair)
    _require_order_above_one(spec, allow_inf=False)
    plan = monotone_coupling(p_i, p_j)
    w_max = plan.max_displacement()
    if w_max == 0.0:
        result = _no_noise_result("baseline-gaussian", math.log(spec.epsilon))
        return replace(result, functional_value=0.0, log_functional_value=-math.inf,
                       target_value=spec.epsilon)
    sigma = math.sqrt(spec.alpha * w_max**2 / (2.0 * spec.epsilon))
    value = spec.alpha * w_max**2 / (2.0 * sigma**2)
    return CalibrationResult(
        parameter=sigma,
        mechanism="baseline-gaussian",
        functional_value=value,
        log_functional_value=math.log(value),
        target_value=spec.epsilon,
        log_target=math.log(spec.epsilon),
        iterations=0,
        bracket=(sigma, sigma),
        guarantee_side=value <= spec.epsilon * (1.0 + _GUARANTEE_TOL),
    )


def rdp_gaussian_closed_form(delta_sensitivity: float, spec: PrivacySpec) -> float:
    """Point-mass (deterministic data) Gaussian rule sigma = sqrt(alpha D^2 / (2 eps))."""
    if not (math.isfinite(delta_sensitivity) and delta_sensitivity >= 0.0):
        raise InvalidValue(f"sensitivity must be nonnegative, got {delta_sensitivity!r}")
    _require_order_above_one(spec, allow_inf=False)
    return math.sqrt(spec.alpha * delta_sensitivity**2 / (2.0 * spec.epsilon))


def feasible_b_sub_unit_alpha(pair, spec: PrivacySpec, rel_tol: float = 1e-9) -> CalibrationResult:
    """Smallest Laplace scale meeting the sufficient condition for orders in (0, 1).

    Here the condition flips: sum pi_k exp(-alpha d_k / b) >=
    exp((alpha - 1) epsilon), whose left side increases in b toward 1
    while the right side is below 1. The result is flagged experimental:
    the operational meaning of sub-unit orders is an open question.
    """
    p_i, p_j = _as_pair(pair)
    if not 0.0 < spec.alpha < 1.0:
        raise InvalidValue(f"this mechanism requires alpha in (0,1), got {spec.alpha!r}")
    plan = monotone_coupling(p_i, p_j)
    w_max = plan.max_displacement()
    log_target = (spec.alpha - 1.0) * spec.epsilon
    if log_target >= 0.0:
        # epsilon > 0 and alpha < 1 force a target below 1; anything else
        # would make even infinite noise infeasible.
        raise InfeasibleEvenAtInfinity(
            f"target exp({log_target!r}) >= 1 cannot be reached by the condition"
        )
    diagonal_mass = math.fsum(m for x, x2, m in plan.entries if x == x2)
    if w_max == 0.0 or (diagonal_mass > 0.0 and math.log(diagonal_mass) >= log_target):
        # The condition already holds in the zero-noise limit b -> 0.
        functional = 1.0 if w_max == 0.0 else diagonal_mass
        result = _no_noise_result("laplace-sub-unit", log_target)
        return replace(
            result,
            experimental=True,
            functional_value=functional,
            log_functional_value=math.log(functional),
        )

    def negative_log_condition(b: float) -> float:
        return -coupling_log_expectation(plan, lambda d: -spec.alpha * d / b)

    hi = spec.alpha * w_max / -log_target
    lo = spec.alpha * w_max / (-log_target + _LN2)
    solve = _solve_decreasing(negative_log_condition, -log_target, (lo, hi), rel_tol)
    log_value = -negative_log_condition(solve.value)
    return CalibrationResult(
        parameter=solve.value,
        mechanism="laplace-sub-unit",
        functional_value=_safe_exp(log_value),
        log_functional_value=log_value,
        target_value=_safe_exp(log_target),
        log_target=log_target,
        iterations=solve.iterations,
        bracket=solve.bracket,
        guarantee_side=log_value >= log_target - _GUARANTEE_TOL,
        experimental=True,
    )


MECHANISM_KINDS = (
    "laplace",
    "gaussian",
    "exponential",
    "winf",
    "baseline-laplace",
    "baseline-gaussian",
)


def calibrate_pair(
    pair,
    mechanism_kind: str,
    spec: PrivacySpec,
    rel_tol: float = 1e-9,
    cost: Callable[[float], float] = absolute_cost,
    rate: Callable[[float], float] = reciprocal_rate,
    rate_inverse: Callable[[float], float] | None = None,
) -> CalibrationResult:
    """Dispatch one secret pair to the solver for the requested mechanism kind."""
    if mechanism_kind == "laplace":
        if spec.is_sub_unit:
            return feasible_b_sub_unit_alpha(pair, spec, rel_tol)
        return calibrate_laplace(pair, spec, rel_tol)
    if mechanism_kind == "gaussian":
        return calibrate_gaussian(pair, spec, rel_tol)
    if mechanism_kind == "exponential":
        return calibrate_exponential(pair, spec, cost, rate, rate_inverse, rel_tol)
    if mechanism_kind == "winf":
        return calibrate_winf_laplace(pair, spec.epsilon)
    if mechanism_kind == "baseline-laplace":
        return baseline_laplace_rpp(pair, spec, rel_tol)
    if mechanism_kind == "baseline-gaussian":
        return baseline_gaussian_rpp(pair, spec)
    raise InvalidValue(f"unknown mechanism kind {mechanism_kind!r}")


def calibrate_over_scenarios(
    scenarios: ScenarioSet,
    mechanism_kind: str,
    spec: PrivacySpec,
    rel_tol: float = 1e-9,
    cost: Callable[[float], float] = absolute_cost,
    rate: Callable[[float], float] = reciprocal_rate,
    rate_inverse: Callable[[float], float] | None = None,
) -> CalibrationResult:
    """Calibrate every pair and keep the maximum parameter (the binding pair).

    Ties break toward the lowest pair index; per-pair solver errors are
    re-raised with the pair label prepended.
    """
    best: CalibrationResult | None = None
    best_index = 0
    for index, pair in enumerate(scenarios.pairs):
        try:
            result = calibrate_pair(
                pair, mechanism_kind, spec, rel_tol, cost, rate, rate_inverse
            )
        except PuffercalError as exc:
            label = pair.label or f"pair-{index}"
            raise type(exc)(f"pair '{label}': {exc}") from exc
        if best is None or result.parameter > best.parameter:
            best = result
            best_index = index
    assert best is not None
    return replace(
        best,
        binding_pair_index=best_index,
        binding_pair_label=scenarios.pairs[best_index].label or f"pair-{best_index}",
    )
