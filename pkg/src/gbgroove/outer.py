"""Self-similar groove profiles: the fourth-order (unpassivated) solution
and the higher-order outer corrections of the passivated problem.

All shapes are functions of the similarity variable u = x/(Bt)^(1/4) with
series argument z = u^4/256.  Evaluators clamp at u = U_CLAMP and return 0
beyond it; past that point the profile is buried in cancellation noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .specfun import (
    DEFAULT_TOL,
    SeriesResult,
    gamma,
    hyp_series_derivative,
)

__all__ = [
    "U_CLAMP",
    "OuterSpec",
    "SimilarityPoint",
    "ExpansionValue",
    "QuadratureError",
    "basis_f1",
    "basis_f2",
    "mullins_profile",
    "mullins_shape",
    "mullins_shape_diagnostics",
    "mullins_derivative",
    "outer_term",
    "outer_term_shape",
    "outer_term_derivative",
    "outer_expansion",
    "yr_quadrature_oracle",
    "mullins_ode_residual",
]

U_CLAMP = 12.0
MAX_ORDER = 8

_SQRT2 = math.sqrt(2.0)
_G12 = gamma(0.5)
_G34 = gamma(0.75)
_G54 = gamma(1.25)

# series parameter blocks reused throughout
_EVEN = ((0.25,), (0.75, 1.25, 1.5))      # multiplies u^2
_CONST = ((-0.25,), (0.25, 0.5, 0.75))    # constant prefactor
_CUBIC = ((0.5,), (1.25, 1.5, 1.75))      # multiplies u^3
_Z_SCALE = 1.0 / 256.0


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested accuracy."""


@dataclass(frozen=True)
class OuterSpec:
    """Order and tolerance of the outer expansion."""

    m: float
    N: int = 2
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if not 0 <= self.N <= MAX_ORDER:
            raise ValueError(f"order N must be in [0, {MAX_ORDER}], got {self.N}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


@dataclass(frozen=True)
class SimilarityPoint:
    """Similarity variable and the induced series argument."""

    u: float
    z: float

    @classmethod
    def from_u(cls, u: float) -> "SimilarityPoint":
        if u < 0:
            raise ValueError(f"u must be non-negative, got {u}")
        return cls(u=u, z=u ** 4 / 256.0)


@dataclass(frozen=True)
class ExpansionValue:
    """Outer expansion value with a truncation indicator."""

    value: float
    last_term_magnitude: float
    order: int


def _check_bt(t: float, B: float) -> float:
    bt = B * t
    if not bt > 0:
        raise ValueError(f"need B*t > 0, got B={B}, t={t}")
    return bt


def _similarity(x: float, t: float, B: float) -> tuple[float, float]:
    """(u, L) with L = (Bt)^(1/4)."""
    if x < 0:
        raise ValueError(f"x must be non-negative, got {x}")
    bt = _check_bt(t, B)
    L = bt ** 0.25
    return x / L, L


def _shape_deriv(pieces, u: float, order: int, tol: float = DEFAULT_TOL,
                 diagnostics: bool = False):
    """Sum of c * d^order/du^order [u^p pFq(a; b; u^4/256)] over pieces.

    The cancellation that kills a decaying profile happens between the
    pieces, not inside a single series, so the diagnostic tracks the
    largest piece against the combined value.
    """
    total = 0.0
    comp = 0.0
    max_piece = 0.0
    for c, power, (nums, dens) in pieces:
        if c == 0.0:
            continue
        res = hyp_series_derivative(nums, dens, _Z_SCALE, power, 4, u, order, tol)
        piece = c * res.value
        max_piece = max(max_piece, abs(piece), abs(c) * res.max_term_magnitude)
        t = total + piece
        comp += (total - t) + piece if abs(total) >= abs(piece) else (piece - t) + total
        total = t
    value = total + comp
    if not diagnostics:
        return value
    if value != 0.0 and max_piece > 0.0:
        cancel = max(0.0, math.log10(max_piece / abs(value)))
    else:
        cancel = float("inf") if max_piece > 0 and value == 0.0 else 0.0
    return SeriesResult(value=value, terms_used=1,
                        max_term_magnitude=max_piece,
                        cancellation_digits=cancel)


def _linear_term_deriv(c: float, u: float, order: int) -> float:
    if order == 0:
        return c * u
    if order == 1:
        return c
    return 0.0


def mullins_shape(u: float, order: int = 0, tol: float = DEFAULT_TOL) -> float:
    """d^order/du^order of the unpassivated similarity shape Z(u) = y0/(m (Bt)^{1/4})."""
    if u > U_CLAMP:
        return 0.0
    pieces = (
        (-1.0 / (4.0 * _SQRT2 * _G34), 2, _EVEN),
        (-1.0 / (2.0 * _SQRT2 * _G54), 0, _CONST),
    )
    return _linear_term_deriv(0.5, u, order) + _shape_deriv(pieces, u, order, tol)


def mullins_shape_diagnostics(u: float, order: int = 0,
                              tol: float = DEFAULT_TOL) -> SeriesResult:
    """As mullins_shape but reporting combination-level cancellation.

    Bypasses the clamp so the unreliable region can actually be probed.
    """
    pieces = (
        (-1.0 / (4.0 * _SQRT2 * _G34), 2, _EVEN),
        (-1.0 / (2.0 * _SQRT2 * _G54), 0, _CONST),
    )
    res = _shape_deriv(pieces, u, order, tol, diagnostics=True)
    lin = _linear_term_deriv(0.5, u, order)
    value = res.value + lin
    max_piece = max(res.max_term_magnitude, abs(lin))
    cancel = max(0.0, math.log10(max_piece / abs(value))) if value != 0.0 else float("inf")
    return SeriesResult(value=value, terms_used=res.terms_used,
                        max_term_magnitude=max_piece, cancellation_digits=cancel)


def basis_f1(x: float, t: float, B: float, tol: float = DEFAULT_TOL) -> float:
    """First decaying self-similar basis solution of the fourth-order problem."""
    u, L = _similarity(x, t, B)
    if u > U_CLAMP:
        return 0.0
    pieces = (
        (-1.0 / (2.0 * _G34), 2, _EVEN),
        (1.0 / (6.0 * _SQRT2 * _G12), 3, _CUBIC),
    )
    return L * (u / _SQRT2 + _shape_deriv(pieces, u, 0, tol))


def basis_f2(x: float, t: float, B: float, tol: float = DEFAULT_TOL) -> float:
    """Second decaying self-similar basis solution of the fourth-order problem."""
    u, L = _similarity(x, t, B)
    if u > U_CLAMP:
        return 0.0
    pieces = (
        (1.0 / _G54, 0, _CONST),
        (1.0 / (6.0 * _SQRT2 * _G12), 3, _CUBIC),
    )
    return L * (-u / _SQRT2 + _shape_deriv(pieces, u, 0, tol))


def mullins_profile(x: float, t: float, B: float, m: float,
                    tol: float = DEFAULT_TOL) -> float:
    """Unpassivated groove profile y0(x, t)."""
    u, L = _similarity(x, t, B)
    return m * L * mullins_shape(u, 0, tol)


def mullins_derivative(x: float, t: float, B: float, m: float, order: int,
                       tol: float = DEFAULT_TOL) -> float:
    """d^order/dx^order of the unpassivated profile, term-differentiated."""
    u, L = _similarity(x, t, B)
    return m * L ** (1 - order) * mullins_shape(u, order, tol)


def outer_term_shape(r: int, u: float, order: int = 0,
                     tol: float = DEFAULT_TOL) -> float:
    """d^order/du^order of the order-r correction shape Y_r(u) (per unit m)."""
    if r < 1:
        raise ValueError(f"correction index r must be >= 1, got {r}")
    if u > U_CLAMP:
        return 0.0
    rf = math.factorial(r)
    ga = gamma(1.5 * r - 0.25)
    gb = gamma(1.5 * r + 0.25)
    sign = -1.0 if r % 2 else 1.0
    pieces = (
        (sign * ga / (4.0 * math.pi * rf), 0, ((1.5 * r - 0.25,), (0.25, 0.5, 0.75))),
        (-sign * gb / (8.0 * math.pi * rf), 2, ((1.5 * r + 0.25,), (0.75, 1.25, 1.5))),
    )
    return _shape_deriv(pieces, u, order, tol)


def outer_term(r: int, x: float, t: float, B: float, m: float,
               tol: float = DEFAULT_TOL) -> float:
    """Order-r outer correction y_r(x, t); enters the expansion as alpha^r y_r."""
    u, L = _similarity(x, t, B)
    return m * L ** (1 - 2 * r) * outer_term_shape(r, u, 0, tol)


def outer_term_derivative(r: int, x: float, t: float, B: float, m: float,
                          order: int, tol: float = DEFAULT_TOL) -> float:
    """d^order/dx^order of y_r, term-differentiated."""
    u, L = _similarity(x, t, B)
    return m * L ** (1 - 2 * r - order) * outer_term_shape(r, u, order, tol)


def outer_expansion(x: float, t: float, spec: OuterSpec, B: float,
                    alpha: float) -> ExpansionValue:
    """y0 + sum_{r=1..N} alpha^r y_r with the magnitude of the last retained term.

    alpha must carry the same units as (Bt)^(1/2) (pass alpha_hat with
    nondimensional x, t or the dimensional alpha with SI inputs).
    """
    y = mullins_profile(x, t, B, spec.m, spec.tol)
    last = abs(y)
    for r in range(1, spec.N + 1):
        term = alpha ** r * outer_term(r, x, t, B, spec.m, spec.tol)
        y += term
        last = abs(term)
    if spec.N >= 1 and alpha == 0.0:
        last = 0.0
    return ExpansionValue(value=y, last_term_magnitude=last, order=spec.N)


# arguments of 1.5*r -/+ 0.25 lie in 1/4 + Z/2: never a Gamma pole for r >= 1
def _assert_no_pole(r: int) -> None:
    for a in (1.5 * r - 0.25, 1.5 * r + 0.25):
        assert a > 0 or a != math.floor(a)


def yr_quadrature_oracle(r: int, x: float, t: float, B: float, m: float,
                         rtol: float = 1e-11) -> float:
    """Order-r correction by direct inverse cosine-transform quadrature.

    Fully independent of the hypergeometric evaluation path: integrates
    (2/pi) * (-Bt)^r * (m / (2 r!)) * k^{6r-2} e^{-B k^4 t} cos(k x)
    over k after rescaling to the similarity variable.
    """
    if r < 1:
        raise ValueError(f"correction index r must be >= 1, got {r}")
    u, L = _similarity(x, t, B)
    power = 6 * r - 2

    def integrand(kappa):
        return kappa ** power * math.exp(-kappa ** 4) * math.cos(kappa * u)

    # cut where the envelope falls 16 decades below its peak
    peak_k = (power / 4.0) ** 0.25
    peak = peak_k ** power * math.exp(-peak_k ** 4)
    k_max = peak_k
    while k_max ** power * math.exp(-k_max ** 4) > 1e-16 * peak:
        k_max += 0.25
    val, err = quad(integrand, 0.0, k_max, limit=400,
                    epsabs=1e-15 * max(peak, 1.0), epsrel=rtol)
    if not math.isfinite(val) or err > max(1e-13 * peak, 10 * rtol * abs(val)):
        raise QuadratureError(
            f"cosine-transform quadrature for r={r}, u={u:.3g} reported "
            f"error {err:.2e} against value {val:.6e}")
    sign = -1.0 if r % 2 else 1.0
    return sign * m * L ** (1 - 2 * r) / (math.pi * math.factorial(r)) * val


def mullins_ode_residual(u: float, profile=None, tol: float = DEFAULT_TOL) -> float:
    """Residual of the similarity ODE Z'''' - (u/4) Z' + Z/4 at u.

    `profile` is a callable profile(u, order) returning the order-th
    derivative of a similarity shape; defaults to the built-in
    unpassivated shape with term-differentiated series derivatives.
    """
    if profile is None:
        profile = lambda uu, order=0: mullins_shape(uu, order, tol)
    z0 = profile(u, 0)
    z1 = profile(u, 1)
    z4 = profile(u, 4)
    return z4 - 0.25 * u * z1 + 0.25 * z0
