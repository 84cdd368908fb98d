"""Conformable derivative of order alpha in (0, 1].

Two interior routes are provided: `deriv_limit` drives the defining
difference quotient (f(t + theta*(t-a)^(1-alpha)) - f(t)) / theta to its
two-sided limit with Richardson extrapolation, and `deriv_closed_form`
uses the equivalent closed form (t-a)^(1-alpha) * f'(t) with f' obtained
from dual numbers.

At the lower terminal t = a the two conventions differ:

* ``TerminalMode.ORIGINAL`` -- the value is the limit of interior
  derivatives as t -> a+, independent of f(a).
* ``TerminalMode.CORRECTED`` -- the value exists iff the right first
  derivative f'(a) exists, and equals f'(a) for alpha = 1 and 0 for
  alpha < 1.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence, Union

from .errors import NonDifferentiableError, PreconditionError
from .expr import FuncSpec, evaluate, evaluate_dual

__all__ = [
    "EvalResult",
    "LimitSchedule",
    "Order",
    "Terminal",
    "TerminalMode",
    "DEFAULT_SCHEDULE",
    "deriv_at_terminal",
    "deriv_closed_form",
    "deriv_limit",
    "order_convert",
]

PointFunc = Callable[[float], float]
Func = Union[FuncSpec, PointFunc]

_EPS = sys.float_info.epsilon


@dataclass(frozen=True)
class Order:
    """Fractional order constrained to (0, 1]."""

    alpha: float

    def __post_init__(self):
        if not (isinstance(self.alpha, (int, float)) and 0.0 < self.alpha <= 1.0):
            raise ValueError("alpha must lie in (0,1]")
        object.__setattr__(self, "alpha", float(self.alpha))


@dataclass(frozen=True)
class Terminal:
    """Lower terminal of the operator."""

    a: float

    def __post_init__(self):
        if not (isinstance(self.a, (int, float)) and math.isfinite(self.a)):
            raise ValueError("lower terminal a must be finite")
        object.__setattr__(self, "a", float(self.a))


class TerminalMode(Enum):
    ORIGINAL = "original"
    CORRECTED = "corrected"


@dataclass(frozen=True)
class LimitSchedule:
    """Step schedule for limit extrapolation.

    ``theta0 = None`` selects the automatic initial step
    ``min(1e-2 * max(1, t-a), 0.5 * (t-a)^alpha)``; the second bound keeps
    every probe point strictly inside (a, inf), where the function may be
    undefined otherwise.  An explicit ``theta0`` is used as given.
    """

    theta0: float | None = None
    shrink: float = 0.5
    levels: int = 12
    cauchy_tol: float = 1e-8
    divergence_cap: float = 1e12

    def __post_init__(self):
        if self.theta0 is not None and not self.theta0 > 0.0:
            raise ValueError("theta0 must be positive")
        if not 0.0 < self.shrink < 1.0:
            raise ValueError("shrink must lie in (0,1)")
        if self.levels < 3:
            raise ValueError("levels must be at least 3")
        if not self.cauchy_tol > 0.0:
            raise ValueError("cauchy_tol must be positive")
        if not self.divergence_cap > 0.0:
            raise ValueError("divergence_cap must be positive")


DEFAULT_SCHEDULE = LimitSchedule()

# Mesh offset for terminal evaluation: t_k = a + 1e-2 * shrink^k.
_TERMINAL_OFFSET = 1e-2


@dataclass(frozen=True)
class EvalResult:
    """Value-or-nonexistence outcome of an operator evaluation."""

    value: float | None = None
    err_estimate: float | None = None
    reason: str | None = None

    def __post_init__(self):
        if (self.value is None) == (self.reason is None):
            raise ValueError("exactly one of value and reason must be set")
        if self.value is not None and not (self.err_estimate is not None and self.err_estimate >= 0.0):
            raise ValueError("a value requires a non-negative err_estimate")

    @property
    def exists(self) -> bool:
        return self.value is not None

    @classmethod
    def of(cls, value: float, err_estimate: float = 0.0) -> "EvalResult":
        return cls(value=float(value), err_estimate=float(err_estimate))

    @classmethod
    def does_not_exist(cls, reason: str) -> "EvalResult":
        return cls(reason=reason)


def _order_value(alpha: Order | float) -> float:
    if isinstance(alpha, Order):
        return alpha.alpha
    return Order(alpha).alpha


def _terminal_value(a: Terminal | float) -> float:
    if isinstance(a, Terminal):
        return a.a
    return Terminal(a).a


def _power(base: float, expo: float) -> float:
    """exp(expo * ln(base)) with an explicit base > 0 guard."""
    if not base > 0.0:
        raise PreconditionError(f"power base must be positive, got {base!r}")
    return math.exp(expo * math.log(base))


def _point(f: Func, x: float, a: float) -> float:
    if isinstance(f, FuncSpec):
        return evaluate(f, x, a)
    return f(x)


# --------------------------------------------------------------------------
# Extrapolation helpers
# --------------------------------------------------------------------------

def _neville_best(samples: Sequence[float], factors: Sequence[float]) -> tuple[float, float]:
    """Richardson/Neville tableau with best-entry tracking.

    ``samples[k]`` is an approximation at step ``h0 * r^-k``;
    ``factors[j]`` is ``r**p_j`` for the error order eliminated by column j.
    Returns the tableau entry with the smallest local error estimate.
    """
    col = list(samples)
    best = col[-1]
    best_err = abs(col[-1] - col[-2]) if len(col) > 1 else math.inf
    for fac in factors:
        if len(col) < 2:
            break
        nxt = []
        for lo, hi in zip(col, col[1:]):
            val = hi + (hi - lo) / (fac - 1.0)
            err = max(abs(val - hi), abs(val - lo))
            if err < best_err:
                best, best_err = val, err
            nxt.append(val)
        col = nxt
    return best, best_err


def _limit_of_power_sequence(
    values: Sequence[float],
    ratio: float,
    cauchy_tol: float,
    divergence_cap: float,
) -> tuple[float | None, float, str | None]:
    """Limit of values sampled on a geometric mesh h_k = h0 * ratio^-k.

    Assumes an error expansion C*h^p + O(h^(p+1)) with unknown p > 0; the
    leading exponent is estimated from successive difference ratios and
    eliminated together with its integer-offset ladder.  Returns
    ``(limit, err, None)`` on success and ``(None, 0.0, reason)`` when the
    sequence is detected as non-convergent.  Detection is a heuristic, not
    a proof.
    """
    scale = max(abs(v) for v in values)
    if scale > divergence_cap:
        return None, 0.0, "values exceed the divergence cap"
    diffs = [b - a for a, b in zip(values, values[1:])]
    tiny = 64.0 * _EPS * max(1.0, scale)
    if abs(diffs[-1]) <= tiny and abs(diffs[-2]) <= tiny:
        return values[-1], max(abs(diffs[-1]), _EPS * scale), None
    usable = _usable_ratios(diffs, tiny)
    if len(usable) < 1:
        # Cannot form contraction ratios; fall back to a plain Cauchy test.
        if abs(diffs[-1]) <= cauchy_tol * max(1.0, abs(values[-1])):
            return values[-1], abs(diffs[-1]), None
        return None, 0.0, "mesh values did not stabilize"
    if usable[-1] >= 1.0:
        return None, 0.0, "mesh values do not contract toward a limit"
    # The ratio sequence approaches ratio**-p with an integer-power error
    # ladder in h; Richardson steps on the ratios sharpen the contraction
    # estimate to O(h^2) or O(h^3) depending on how many are usable.
    if len(usable) >= 3:
        s1 = (ratio * usable[-2] - usable[-3]) / (ratio - 1.0)
        s2 = (ratio * usable[-1] - usable[-2]) / (ratio - 1.0)
        rho = (ratio**2 * s2 - s1) / (ratio**2 - 1.0)
    elif len(usable) == 2:
        rho = (ratio * usable[-1] - usable[-2]) / (ratio - 1.0)
    else:
        rho = usable[-1]
    if not math.isfinite(rho) or rho >= 0.995 or rho <= -1.0:
        return None, 0.0, "mesh values do not contract toward a limit"
    if abs(rho) < 1e-3:
        rho = math.copysign(1e-3, rho if rho != 0.0 else 1.0)
    window = values[: len(usable) + 2]  # entries backing the usable ratios
    base_factor = 1.0 / rho  # = ratio**p for the estimated leading order p
    factors = [base_factor * ratio**j for j in range(len(window) - 1)]
    val, err = _neville_best(window, factors)
    if err <= cauchy_tol * max(1.0, abs(val)):
        return val, err, None
    return None, 0.0, "extrapolation toward the terminal did not converge"


def _usable_ratios(diffs: Sequence[float], tiny: float) -> list[float]:
    """Difference ratios up to the point where rounding noise takes over.

    Genuine power-law data drifts slowly from one ratio to the next; a
    sudden jump (or a vanishing denominator) marks the noise floor, and
    everything from there on is discarded.
    """
    out: list[float] = []
    for k in range(len(diffs) - 1):
        if abs(diffs[k]) <= tiny:
            break
        rho = diffs[k + 1] / diffs[k]
        if not math.isfinite(rho):
            break
        if out and abs(rho - out[-1]) > 0.1 * max(abs(out[-1]), 0.05):
            break
        out.append(rho)
    return out


# --------------------------------------------------------------------------
# Operators
# --------------------------------------------------------------------------

def deriv_closed_form(
    f: FuncSpec,
    alpha: Order | float,
    a: Terminal | float,
    t: float,
) -> EvalResult:
    """(t-a)^(1-alpha) * f'(t) with f' from dual numbers; interior t only."""
    al = _order_value(alpha)
    av = _terminal_value(a)
    if not t > av:
        raise PreconditionError("t must lie strictly above the lower terminal a")
    weight = _power(t - av, 1.0 - al)
    try:
        d = evaluate_dual(f, t)
    except NonDifferentiableError as exc:
        return EvalResult.does_not_exist(f"no first derivative at t={t!r}: {exc}")
    return EvalResult.of(weight * d.deriv, 0.0)


def deriv_limit(
    f: Func,
    alpha: Order | float,
    a: Terminal | float,
    t: float,
    sched: LimitSchedule = DEFAULT_SCHEDULE,
) -> EvalResult:
    """Two-sided limit of the defining difference quotient at interior t.

    Probes theta of both signs, extrapolates each side (and their central
    average) over the geometric step schedule, and reports DoesNotExist
    when the extrapolants fail the Cauchy test, the one-sided limits
    disagree, or the raw quotients pass the divergence cap.
    """
    al = _order_value(alpha)
    av = _terminal_value(a)
    d = t - av
    if not d > 0.0:
        raise PreconditionError("t must lie strictly above the lower terminal a")
    weight = _power(d, 1.0 - al)
    theta0 = sched.theta0
    if theta0 is None:
        theta0 = min(1e-2 * max(1.0, d), 0.5 * d / weight)
    smallest = theta0 * sched.shrink**sched.levels
    if not smallest > math.sqrt(_EPS) * max(1.0, abs(t)):
        raise PreconditionError(
            "limit schedule underflows into rounding noise at this point"
        )
    f0 = _point(f, t, av)
    forward: list[float] = []
    backward: list[float] = []
    theta = theta0
    for _ in range(sched.levels):
        step = theta * weight
        fp = _point(f, t + step, av)
        fm = _point(f, t - step, av)
        forward.append((fp - f0) / theta)
        backward.append((f0 - fm) / theta)
        theta *= sched.shrink
    cap = sched.divergence_cap
    if any(abs(q) > cap for q in forward + backward):
        return EvalResult.does_not_exist("difference quotients exceed the divergence cap")
    r = 1.0 / sched.shrink
    one_sided = [r**j for j in range(1, sched.levels)]
    v_fwd, e_fwd = _neville_best(forward, one_sided)
    v_bwd, e_bwd = _neville_best(backward, one_sided)
    central = [0.5 * (p + q) for p, q in zip(forward, backward)]
    v_ctr, e_ctr = _neville_best(central, [r ** (2 * j) for j in range(1, sched.levels)])
    scale = max(1.0, abs(v_ctr))
    if e_ctr > sched.cauchy_tol * scale:
        return EvalResult.does_not_exist("extrapolated difference quotients are not Cauchy")
    gap = abs(v_fwd - v_bwd)
    noise = 4.0 * (e_fwd + e_bwd)
    if gap > max(sched.cauchy_tol * max(scale, abs(v_fwd), abs(v_bwd)), noise):
        return EvalResult.does_not_exist("one-sided limits disagree")
    return EvalResult.of(v_ctr, max(e_ctr, gap))


def deriv_at_terminal(
    f: FuncSpec,
    alpha: Order | float,
    a: Terminal | float,
    mode: TerminalMode,
    sched: LimitSchedule = DEFAULT_SCHEDULE,
) -> EvalResult:
    """Derivative at the lower terminal itself, under the selected mode.

    ORIGINAL extrapolates interior closed-form derivatives along the mesh
    t_k = a + 1e-2 * shrink^k (independent of f(a) by construction).
    CORRECTED extrapolates the right difference quotient
    (f(a+h) - f(a)) / h, jump decoration included; when that limit exists
    the result is f'(a) for alpha = 1 and 0 for alpha < 1.
    """
    al = _order_value(alpha)
    av = _terminal_value(a)
    ratio = 1.0 / sched.shrink
    offsets = [_TERMINAL_OFFSET * sched.shrink**k for k in range(sched.levels)]
    if mode is TerminalMode.ORIGINAL:
        mesh: list[float] = []
        for h in offsets:
            r = deriv_closed_form(f, al, av, av + h)
            if not r.exists:
                return EvalResult.does_not_exist(
                    f"not differentiable arbitrarily close to the terminal: {r.reason}"
                )
            mesh.append(r.value)
        val, err, why = _limit_of_power_sequence(
            mesh, ratio, sched.cauchy_tol, sched.divergence_cap
        )
        if why is not None:
            return EvalResult.does_not_exist(
                f"interior derivatives have no finite limit at the terminal: {why}"
            )
        return EvalResult.of(val, err)
    f_at_a = evaluate(f, av, av)
    quotients = [(evaluate(f, av + h, av) - f_at_a) / h for h in offsets]
    val, err, why = _limit_of_power_sequence(
        quotients, ratio, sched.cauchy_tol, sched.divergence_cap
    )
    if why is not None:
        return EvalResult.does_not_exist(
            f"right first derivative does not exist at the terminal: {why}"
        )
    if al == 1.0:
        return EvalResult.of(val, err)
    return EvalResult.of(0.0, 0.0)


def order_convert(
    value: float,
    alpha: Order | float,
    beta: Order | float,
    a: Terminal | float,
    t: float,
) -> float:
    """Convert a derivative of order beta at interior t into one of order alpha."""
    al = _order_value(alpha)
    be = _order_value(beta)
    av = _terminal_value(a)
    if not t > av:
        raise PreconditionError("t must lie strictly above the lower terminal a")
    return _power(t - av, be - al) * value
