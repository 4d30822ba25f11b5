"""Gamma, Pochhammer and generalized hypergeometric series.

Everything here is plain float64 arithmetic with compensated (Neumaier)
summation.  The pFq evaluator reports how many digits were lost to
cancellation so that downstream profile code can flag unreliable values
instead of returning garbage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "GammaPoleError",
    "SeriesError",
    "HypArgs",
    "SeriesResult",
    "DEFAULT_TOL",
    "TERM_BUDGET",
    "CANCELLATION_FLAG_DIGITS",
    "ln_gamma",
    "gamma",
    "reciprocal_gamma",
    "pochhammer",
    "hyp_pFq",
    "hyp_pFq_derivative",
    "hyp_series_derivative",
]

DEFAULT_TOL = 1e-12
TERM_BUDGET = 500
# results with more cancelled digits than this are flagged unreliable
CANCELLATION_FLAG_DIGITS = 12.0


class GammaPoleError(ValueError):
    """Gamma evaluated at zero or a negative integer."""


class SeriesError(RuntimeError):
    """Series failed to converge within the term budget."""

    def __init__(self, message, terms_used=0, last_term=float("nan"),
                 partial_sum=float("nan")):
        super().__init__(message)
        self.terms_used = terms_used
        self.last_term = last_term
        self.partial_sum = partial_sum


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


@dataclass(frozen=True)
class HypArgs:
    """Parameters of a generalized hypergeometric series pFq(a; b; z)."""

    numerators: tuple[float, ...]
    denominators: tuple[float, ...]
    argument: float

    def __post_init__(self):
        object.__setattr__(self, "numerators", tuple(float(a) for a in self.numerators))
        object.__setattr__(self, "denominators", tuple(float(b) for b in self.denominators))
        object.__setattr__(self, "argument", float(self.argument))
        for b in self.denominators:
            if _is_nonpositive_integer(b):
                raise GammaPoleError(
                    f"denominator parameter {b} is zero or a negative integer")
        if len(self.numerators) > len(self.denominators):
            raise ValueError("need p <= q for an entire series")

    def shifted(self, k: int) -> "HypArgs":
        """Args with every parameter shifted by k (series derivative identity)."""
        return HypArgs(tuple(a + k for a in self.numerators),
                       tuple(b + k for b in self.denominators),
                       self.argument)


@dataclass(frozen=True)
class SeriesResult:
    """Value of a summed series plus convergence diagnostics."""

    value: float
    terms_used: int
    max_term_magnitude: float
    cancellation_digits: float

    @property
    def reliable(self) -> bool:
        return self.cancellation_digits <= CANCELLATION_FLAG_DIGITS


def ln_gamma(x: float) -> tuple[float, int]:
    """log|Gamma(x)| and the sign of Gamma(x).

    Raises GammaPoleError at 0, -1, -2, ...
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"ln_gamma needs a finite argument, got {x}")
    if _is_nonpositive_integer(x):
        raise GammaPoleError(f"Gamma pole at x = {x}")
    val = math.lgamma(x)
    if x > 0:
        sign = 1
    else:
        # Gamma alternates sign between consecutive negative-integer poles
        sign = 1 if math.floor(x) % 2 == 0 else -1
    return val, sign


def gamma(x: float) -> float:
    """Gamma(x) with sign, via the log-gamma channel."""
    val, sign = ln_gamma(x)
    return sign * math.exp(val)


def reciprocal_gamma(x: float) -> float:
    """1/Gamma(x); entire, returns 0.0 at the poles of Gamma."""
    x = float(x)
    if _is_nonpositive_integer(x):
        return 0.0
    val, sign = ln_gamma(x)
    return sign * math.exp(-val)


def pochhammer(lam: float, k: int) -> float:
    """Rising factorial (lam)_k = lam (lam+1) ... (lam+k-1); (lam)_0 = 1."""
    if k < 0:
        raise ValueError("pochhammer needs k >= 0")
    out = 1.0
    for i in range(int(k)):
        out *= lam + i
    return out


class _NeumaierSum:
    """Compensated accumulator: error O(eps)|sum| + O(n eps^2) sum|terms|."""

    __slots__ = ("s", "c")

    def __init__(self, s0: float = 0.0):
        self.s = s0
        self.c = 0.0

    def add(self, x: float) -> None:
        t = self.s + x
        if abs(self.s) >= abs(x):
            self.c += (self.s - t) + x
        else:
            self.c += (x - t) + self.s
        self.s = t

    @property
    def value(self) -> float:
        return self.s + self.c


def _terminating_at(numerators: tuple[float, ...]) -> int | None:
    """Smallest k with (a)_k = 0 for a negative-integer numerator, else None."""
    cut = None
    for a in numerators:
        if _is_nonpositive_integer(a):
            k = int(-a) + 1
            cut = k if cut is None else min(cut, k)
    return cut


def hyp_pFq(args: HypArgs, tol: float = DEFAULT_TOL) -> SeriesResult:
    """Sum pFq(a; b; z) by the term recurrence with compensated accumulation.

    Stops once three consecutive terms fall below tol * |partial sum|.
    Terminating series (negative-integer numerator) are summed exactly.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    cut = _terminating_at(args.numerators)
    acc = _NeumaierSum(1.0)
    term = 1.0
    max_term = 1.0
    small_count = 0
    k = 0
    z = args.argument
    while True:
        if cut is not None and k >= cut:
            break
        if k >= TERM_BUDGET:
            raise SeriesError(
                f"series did not converge within {TERM_BUDGET} terms "
                f"(|last term| = {abs(term):.3e}, partial sum = {acc.value:.6e})",
                terms_used=k, last_term=term, partial_sum=acc.value)
        ratio = z / (k + 1.0)
        for a in args.numerators:
            ratio *= a + k
        for b in args.denominators:
            ratio /= b + k
        term *= ratio
        acc.add(term)
        k += 1
        max_term = max(max_term, abs(term))
        if cut is None:
            if abs(term) <= tol * abs(acc.value):
                small_count += 1
                if small_count >= 3:
                    break
            else:
                small_count = 0
    value = acc.value
    if value != 0.0:
        cancel = max(0.0, math.log10(max_term / abs(value)))
    else:
        cancel = float("inf") if max_term > 0 else 0.0
    return SeriesResult(value=value, terms_used=max(k, 1),
                        max_term_magnitude=max_term,
                        cancellation_digits=cancel)


def hyp_pFq_derivative(args: HypArgs, order: int, tol: float = DEFAULT_TOL) -> SeriesResult:
    """n-th derivative of pFq with respect to its argument.

    Uses the parameter-shift identity
        d^n/dz^n pFq(a; b; z) = [prod (a)_n / prod (b)_n] pFq(a+n; b+n; z),
    equivalent to term-by-term differentiation of the series.
    """
    if not 1 <= order <= 6:
        raise ValueError("derivative order must be in [1, 6]")
    pref = 1.0
    for a in args.numerators:
        pref *= pochhammer(a, order)
    for b in args.denominators:
        pref /= pochhammer(b, order)
    inner = hyp_pFq(args.shifted(order), tol)
    return SeriesResult(value=pref * inner.value,
                        terms_used=inner.terms_used,
                        max_term_magnitude=abs(pref) * inner.max_term_magnitude,
                        cancellation_digits=inner.cancellation_digits)


def hyp_series_derivative(numerators, denominators, scale: float, power: int,
                          step: int, x: float, order: int,
                          tol: float = DEFAULT_TOL) -> SeriesResult:
    """d^order/dx^order of  x**power * pFq(a; b; scale * x**step).

    Term-differentiated power series: the building block for similarity
    profiles (step=4) and corner-layer solutions (step=6), where finite
    differences would compound cancellation.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    x = float(x)
    numerators = tuple(float(a) for a in numerators)
    denominators = tuple(float(b) for b in denominators)
    cut = _terminating_at(numerators)

    def param_ratio(k: int) -> float:
        r = scale / (k + 1.0)
        for a in numerators:
            r *= a + k
        for b in denominators:
            r /= b + k
        return r

    if x == 0.0:
        # only the monomial matching the derivative order survives
        if (order - power) % step == 0 and order >= power:
            k_hit = (order - power) // step
            if cut is not None and k_hit >= cut:
                return SeriesResult(0.0, 1, 0.0, 0.0)
            coeff = 1.0
            for k in range(k_hit):
                coeff *= param_ratio(k)
            val = coeff * math.factorial(order)
            return SeriesResult(val, k_hit + 1, abs(val), 0.0)
        return SeriesResult(0.0, 1, 0.0, 0.0)

    # first index whose monomial power reaches the derivative order
    k0 = max(0, (order - power + step - 1) // step)
    coeff = 1.0
    for k in range(k0):
        coeff *= param_ratio(k)
    # carry coeff * x^(step k + power - order) as one quantity: the naked
    # power overflows long before the term itself does
    base = coeff * x ** (step * k0 + power - order)
    xstep = x ** step
    acc = _NeumaierSum()
    max_term = 0.0
    small_count = 0
    k = k0
    while True:
        p = step * k + power
        fall = 1.0       # falling factorial p (p-1) ... (p-order+1)
        for j in range(order):
            fall *= p - j
        term = base * fall
        if not math.isfinite(term):
            raise SeriesError(
                f"series term overflowed at k={k} (x={x:.4g}); the value "
                "is outside the representable range", terms_used=k,
                partial_sum=acc.value)
        acc.add(term)
        max_term = max(max_term, abs(term))
        if cut is None and p > order:
            if abs(term) <= tol * max(abs(acc.value), 1e-300):
                small_count += 1
                if small_count >= 3:
                    break
            else:
                small_count = 0
        k += 1
        if cut is not None and k >= cut:
            break
        if k >= TERM_BUDGET:
            raise SeriesError(
                f"term-differentiated series did not converge within {TERM_BUDGET} terms",
                terms_used=k, partial_sum=acc.value)
        base *= param_ratio(k - 1) * xstep
    value = acc.value
    if value != 0.0:
        cancel = max(0.0, math.log10(max_term / abs(value))) if max_term > 0 else 0.0
    else:
        cancel = float("inf") if max_term > 0 else 0.0
    return SeriesResult(value=value, terms_used=max(k - k0, 1),
                        max_term_magnitude=max_term,
                        cancellation_digits=cancel)
