"""Per-period utility families and their inverse transforms.

All solvers in this package work in utility space: a contract promises a
per-period utility value ``v`` and the firm pays the consumption ``phi(v)``
needed to deliver it.  This module provides the closed-form families

* ``SQRT_POWER``   -- u(c) = c**alpha, alpha in (0, 1), u(0) = 0
* ``ISOELASTIC``   -- u(c) = c**gamma, gamma in (0, 1), u(0) = 0
* ``LOG``          -- u(c) = ln(c), unbounded below

together with the inverse ``phi = u^{-1}``, its derivative ``phi'`` (the
marginal cost of utility) and ``rho``, the inverse of ``phi'`` clipped at
the utility floor.  All maps are strictly monotone on their domains, so the
inverses are exact closed forms rather than numerical roots.

Minus-infinite utility (LOG at c = 0) is represented by the distinguished
sentinel ``NEG_INF_UTILITY``, never by a float: solvers for LOG operate on
open domains, so the sentinel can only surface in validation paths.

All functions are pure and accept scalars or numpy arrays where noted.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "NEG_INF_UTILITY",
    "UtilityDomainError",
    "UtilityKind",
    "UtilitySpec",
    "log_utility",
    "sqrt_power",
    "isoelastic",
    "phi_relaxed",
    "phi_prime_relaxed",
    "phi_second_relaxed",
]


class UtilityDomainError(ValueError):
    """Argument outside the domain of the requested transform."""


class _NegInfUtility:
    """Tagged sentinel for minus-infinite utility. Singleton, not a float."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NEG_INF_UTILITY"

    def __bool__(self) -> bool:
        return False


NEG_INF_UTILITY = _NegInfUtility()


class UtilityKind(enum.Enum):
    SQRT_POWER = "sqrt_power"
    LOG = "log"
    ISOELASTIC = "isoelastic"


@dataclass(frozen=True)
class UtilitySpec:
    """A per-period utility function u plus its inverse transforms.

    ``param`` is the exponent (alpha for SQRT_POWER, gamma for ISOELASTIC)
    and must lie in (0, 1); it is ignored for LOG.  Power kinds are
    normalised so that u(0) = 0; LOG has u(0) = -inf (sentinel).
    """

    kind: UtilityKind
    param: float | None = None

    def __post_init__(self):
        if self.kind is UtilityKind.LOG:
            if self.param is not None:
                raise ValueError("LOG utility takes no parameter")
        else:
            if self.param is None or not (0.0 < self.param < 1.0):
                raise ValueError(
                    f"exponent must lie in (0, 1), got {self.param!r}"
                )

    # -- structural properties ------------------------------------------------

    @property
    def is_bounded_below(self) -> bool:
        return self.kind is not UtilityKind.LOG

    @property
    def floor_utility(self) -> float:
        """u(0) for bounded kinds. Raises for LOG (use the sentinel)."""
        if not self.is_bounded_below:
            raise UtilityDomainError("LOG utility has no finite floor")
        return 0.0

    @property
    def phi_prime_at_floor(self) -> float:
        """Right derivative phi'_+(0). Zero for every bounded power kind."""
        if not self.is_bounded_below:
            raise UtilityDomainError("LOG utility has no floor derivative")
        return 0.0

    # -- forward map -----------------------------------------------------------

    def u(self, c):
        """Utility of consumption c >= 0.

        For LOG, c = 0 yields the NEG_INF_UTILITY sentinel (scalars only).
        """
        if self.kind is UtilityKind.LOG:
            c_arr = np.asarray(c, dtype=float)
            if np.any(c_arr < 0):
                raise UtilityDomainError(f"negative consumption: {c!r}")
            if c_arr.ndim == 0:
                if c_arr == 0.0:
                    return NEG_INF_UTILITY
                return float(np.log(c_arr))
            if np.any(c_arr == 0.0):
                raise UtilityDomainError(
                    "c = 0 under LOG utility: minus-infinite utility is "
                    "represented by the scalar sentinel only"
                )
            return np.log(c_arr)
        c_arr = np.asarray(c, dtype=float)
        if np.any(c_arr < 0):
            raise UtilityDomainError(f"negative consumption: {c!r}")
        out = np.power(c_arr, self.param)
        return float(out) if out.ndim == 0 else out

    # -- inverse map and derivatives --------------------------------------------

    def phi(self, v):
        """Consumption delivering utility v: phi = u^{-1}.

        Bounded kinds require v >= 0; LOG accepts any real v.
        """
        v_arr = np.asarray(v, dtype=float)
        if self.kind is UtilityKind.LOG:
            out = np.exp(v_arr)
        else:
            if np.any(v_arr < 0):
                raise UtilityDomainError(
                    f"utility below range of bounded kind: {v!r}"
                )
            out = np.power(v_arr, 1.0 / self.param)
        return float(out) if out.ndim == 0 else out

    def phi_prime(self, v):
        """Marginal cost of utility phi'(v); strictly increasing."""
        v_arr = np.asarray(v, dtype=float)
        if self.kind is UtilityKind.LOG:
            out = np.exp(v_arr)
        else:
            if np.any(v_arr < 0):
                raise UtilityDomainError(
                    f"utility below range of bounded kind: {v!r}"
                )
            a = self.param
            out = (1.0 / a) * np.power(v_arr, (1.0 - a) / a)
        return float(out) if out.ndim == 0 else out

    def rho(self, x):
        """Inverse of phi', clipped at the utility floor.

        Returns the v solving phi'(v) = x when x >= phi'_+(0); below that
        threshold (only reachable for bounded kinds) it returns the floor
        u(0).  Requires x >= 0 for bounded kinds, x > 0 for LOG.
        """
        x_arr = np.asarray(x, dtype=float)
        if self.kind is UtilityKind.LOG:
            if np.any(x_arr <= 0):
                raise UtilityDomainError(f"phi' of LOG is positive: {x!r}")
            out = np.log(x_arr)
        else:
            if np.any(x_arr < 0):
                raise UtilityDomainError(f"negative marginal cost: {x!r}")
            a = self.param
            # phi'(v) = (1/a) v^{(1-a)/a}  =>  v = (a x)^{a/(1-a)}
            out = np.power(a * x_arr, a / (1.0 - a))
            out = np.where(x_arr < self.phi_prime_at_floor, 0.0, out)
        return float(out) if out.ndim == 0 else out


# -- relaxed-program extensions ------------------------------------------------
#
# Solvers for bounded kinds work on a relaxed program in which utilities may
# go negative during iteration, with the payment extended evenly:
# phi(v) = |v|**(1/alpha).  The extension is convex, agrees with phi on the
# true domain, and keeps derivatives finite across sign changes; a candidate
# with negative utilities is rejected *after* the solve, never mid-iteration.

def phi_relaxed(spec: UtilitySpec, v):
    if spec.kind is UtilityKind.LOG:
        return np.exp(v)
    return np.abs(v) ** (1.0 / spec.param)


def phi_prime_relaxed(spec: UtilitySpec, v):
    if spec.kind is UtilityKind.LOG:
        return np.exp(v)
    a = spec.param
    return (1.0 / a) * np.abs(v) ** (1.0 / a - 1.0) * np.sign(v)


def phi_second_relaxed(spec: UtilitySpec, v):
    if spec.kind is UtilityKind.LOG:
        return np.exp(v)
    a = spec.param
    return (1.0 / a) * (1.0 / a - 1.0) * np.abs(v) ** (1.0 / a - 2.0)


def sqrt_power(alpha: float = 0.5) -> UtilitySpec:
    return UtilitySpec(UtilityKind.SQRT_POWER, alpha)


def isoelastic(gamma: float) -> UtilitySpec:
    return UtilitySpec(UtilityKind.ISOELASTIC, gamma)


def log_utility() -> UtilitySpec:
    return UtilitySpec(UtilityKind.LOG, None)
