"""Problem instances, belief validation, history trees and policy containers.

A :class:`ModelConfig` collects everything that defines one contracting
problem: the horizon ``T``, the grid of private discount factors, the firm
and agent beliefs over that grid, the gross interest rate, the income
process and the utility family.  :func:`validate` checks the model
assumptions (strictly increasing positive discount grid, probabilities,
agent full support, firm-vs-agent first-order stochastic dominance) and
returns a normalised copy; every solver requires a validated config.

Type histories are tuples of 1-based type indices.  The date-T entry is
absent by convention: date-T consumption is indexed by the date-(T-1)
history, so a :class:`Policy` stores one value per (date, history) node
with the terminal date reusing the length-(T-1) histories.  Policies keep
their values in dense per-date arrays indexed by a mixed-radix encoding of
the index sequence, which makes enumeration order deterministic.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .utility import UtilitySpec

__all__ = [
    "IncomeKind",
    "Income",
    "ModelConfig",
    "ValidationError",
    "ValidationIssue",
    "validate",
    "require_degenerate_impatience",
    "require_full_support_p",
    "histories",
    "history_index",
    "DiscountRepresentation",
    "discount_representation",
    "Policy",
    "continuation_value",
    "agent_value",
    "choice_reversal_demo",
    "ReversalDemo",
]

_PROB_SUM_TOL = 1e-12


class IncomeKind(enum.Enum):
    TOTAL_NPV = "total_npv"
    PER_PERIOD = "per_period"


@dataclass(frozen=True)
class Income:
    """Either the date-1 NPV of the income stream or a constant per-period
    income w, with I_T = sum_{t=1..T} w / R**(t-1)."""

    kind: IncomeKind
    value: float

    def npv(self, T: int, R: float) -> float:
        if self.kind is IncomeKind.TOTAL_NPV:
            return self.value
        return self.value * sum(R ** -(t - 1) for t in range(1, T + 1))


@dataclass(frozen=True)
class ModelConfig:
    """One problem instance. Immutable after validation; safe to share."""

    T: int
    deltas: tuple[float, ...]
    p: tuple[float, ...]
    q: tuple[float, ...]
    R: float
    income: Income
    utility: UtilitySpec
    notes: tuple[str, ...] = ()

    @property
    def n_types(self) -> int:
        return len(self.deltas)

    def income_npv(self) -> float:
        return self.income.npv(self.T, self.R)

    def delta(self, index: int) -> float:
        """Discount factor for a 1-based type index."""
        return self.deltas[index - 1]

    def q_bar(self) -> float:
        """Agent-belief mean discount factor sum_n q_n delta^(n)."""
        return float(np.dot(self.q, self.deltas))

    def p_bar(self) -> float:
        """Firm-belief mean discount factor sum_n p_n delta^(n)."""
        return float(np.dot(self.p, self.deltas))

    def is_degenerate_impatience(self) -> bool:
        """Two types with the firm certain of the impatient one (p_1 = 1)."""
        return self.n_types == 2 and self.p[0] == 1.0


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    message: str


class ValidationError(ValueError):
    def __init__(self, issues: list[ValidationIssue]):
        self.issues = issues
        super().__init__("; ".join(f"[{i.code}] {i.message}" for i in issues))


def validate(config: ModelConfig, *, allow_boundary_q: bool = False) -> ModelConfig:
    """Check all model assumptions and return a normalised copy.

    Probability vectors must sum to one within 1e-12 and are then
    renormalised exactly.  Agent beliefs must have full support; with
    ``allow_boundary_q`` a two-type instance with p_1 = 1 may place zero
    weight on one type (the belief-boundary limiting cases), in which case
    an explanatory note is attached instead of an error.

    Idempotent and side-effect free: validating a validated config returns
    an equal config.
    """
    issues: list[ValidationIssue] = []
    notes: list[str] = list(config.notes)

    if config.T < 3:
        issues.append(ValidationIssue(
            "T_RANGE", f"horizon T >= 3 required, got T={config.T}"))

    deltas = tuple(float(d) for d in config.deltas)
    N = len(deltas)
    if N < 2:
        issues.append(ValidationIssue(
            "N_RANGE", f"at least two discount factors required, got N={N}"))
    if any(d <= 0 for d in deltas):
        issues.append(ValidationIssue(
            "DELTA_POSITIVE", f"discount factors must be positive: {deltas}"))
    if any(deltas[i] >= deltas[i + 1] for i in range(N - 1)):
        issues.append(ValidationIssue(
            "DELTA_INCREASING",
            f"discount factors must be strictly increasing: {deltas}"))

    def _check_probs(name: str, vec: tuple[float, ...]):
        v = np.asarray(vec, dtype=float)
        if len(v) != N:
            issues.append(ValidationIssue(
                f"{name.upper()}_LENGTH",
                f"{name} has length {len(v)}, expected {N}"))
            return None
        if np.any(v < 0):
            issues.append(ValidationIssue(
                f"{name.upper()}_NEGATIVE", f"{name} has a negative entry: {vec}"))
            return None
        s = float(v.sum())
        if abs(s - 1.0) > _PROB_SUM_TOL:
            issues.append(ValidationIssue(
                f"{name.upper()}_SUM", f"{name} sums to {s!r}, expected 1"))
            return None
        return tuple(float(x) for x in (v / s))

    p = _check_probs("p", config.p)
    q = _check_probs("q", config.q)

    if q is not None:
        zero_q = [n + 1 for n, qn in enumerate(q) if qn == 0.0]
        if zero_q:
            boundary_ok = (
                allow_boundary_q
                and N == 2
                and p is not None
                and p[0] == 1.0
            )
            if boundary_ok:
                if q[1] == 1.0:
                    notes.append(
                        "q2=1: agent certain of patience; the fully naive "
                        "limiting case (agent preferences and beliefs match "
                        "deterministic quasi-hyperbolic discounting)")
                else:
                    notes.append(
                        "q2=0: agent and firm beliefs coincide; equilibrium "
                        "and efficient problems are identical")
            else:
                issues.append(ValidationIssue(
                    "Q_SUPPORT",
                    f"agent beliefs require full support, q_n > 0; "
                    f"q is zero at n={zero_q}"))

    if p is not None and q is not None:
        cp, cq = 0.0, 0.0
        for m in range(N - 1):
            cp += p[m]
            cq += q[m]
            if cp < cq - 1e-15:
                issues.append(ValidationIssue(
                    "FOSD",
                    f"FOSD violated at m={m + 1}: cumulative firm mass "
                    f"{cp:.6g} < agent mass {cq:.6g} (agent must be the "
                    f"more optimistic about patience)"))
                break

    if config.R < 1.0:
        issues.append(ValidationIssue(
            "R_RANGE", f"gross interest rate R >= 1 required, got {config.R}"))
    if config.income.value <= 0:
        issues.append(ValidationIssue(
            "INCOME_POSITIVE",
            f"income must be positive, got {config.income.value}"))

    if issues:
        raise ValidationError(issues)

    return replace(config, deltas=deltas, p=p, q=q, notes=tuple(notes))


def require_degenerate_impatience(config: ModelConfig) -> None:
    """Raise unless the instance has N = 2 and firm certainty p_1 = 1."""
    issues = []
    if config.n_types != 2:
        issues.append(ValidationIssue(
            "DEGENERATE_N", f"two types required, got N={config.n_types}"))
    elif config.p[0] != 1.0:
        issues.append(ValidationIssue(
            "DEGENERATE_P", "p1=1 required (firm certain of the impatient type)"))
    if not config.utility.is_bounded_below:
        issues.append(ValidationIssue(
            "DEGENERATE_UTILITY",
            "bounded utility with u(0)=0 required: the off-path constructions "
            "place utility at the floor"))
    if issues:
        raise ValidationError(issues)


def require_full_support_p(config: ModelConfig) -> None:
    """Raise unless firm beliefs have full support (general-model solvers)."""
    zero_p = [n + 1 for n, pn in enumerate(config.p) if pn == 0.0]
    zero_q = [n + 1 for n, qn in enumerate(config.q) if qn == 0.0]
    issues = []
    if zero_p:
        issues.append(ValidationIssue(
            "P_SUPPORT", f"firm beliefs require full support; p is zero at n={zero_p}"))
    if zero_q:
        issues.append(ValidationIssue(
            "Q_SUPPORT", f"agent beliefs require full support; q is zero at n={zero_q}"))
    if issues:
        raise ValidationError(issues)


# ---------------------------------------------------------------------------
# Histories
# ---------------------------------------------------------------------------

def histories(config: ModelConfig, t: int, *, restricted: bool = False
              ) -> list[tuple[int, ...]]:
    """All type histories of length t, in lexicographic order.

    A history is a tuple of 1-based type indices (n_1, ..., n_t).  With
    ``restricted`` the first entry is pinned to 1 (the all-impatient root
    used by the degenerate-impatience model), giving N**(t-1) histories
    instead of N**t.
    """
    if not 1 <= t <= config.T - 1:
        raise ValueError(f"date t must lie in 1..T-1 = 1..{config.T - 1}, got {t}")
    N = config.n_types
    firsts = (1,) if restricted else tuple(range(1, N + 1))
    out: list[tuple[int, ...]] = []

    def _extend(prefix: tuple[int, ...]):
        if len(prefix) == t:
            out.append(prefix)
            return
        for n in range(1, N + 1):
            _extend(prefix + (n,))

    for f in firsts:
        _extend((f,))
    return out


def history_index(hist: tuple[int, ...], n_types: int, *, skip_first: bool = False
                  ) -> int:
    """Mixed-radix encoding of a history; equals its lexicographic rank."""
    coords = hist[1:] if skip_first else hist
    idx = 0
    for n in coords:
        if not 1 <= n <= n_types:
            raise ValueError(f"type index {n} outside 1..{n_types}")
        idx = idx * n_types + (n - 1)
    return idx


# ---------------------------------------------------------------------------
# Random-discounting representation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscountRepresentation:
    """Mean-discount representation of date-t choice over streams.

    Total discounting of date t+s utility under the current type i is
    beta_i * delta_bar**s, with beta_i = delta_i / delta_bar and delta_bar
    the agent-belief mean discount factor.  ``beta_exceeds_one`` flags that
    the top type has beta > 1, which disqualifies the representation as a
    random quasi-hyperbolic one.
    """

    delta_bar: float
    betas: tuple[float, ...]
    probabilities: tuple[float, ...]
    beta_exceeds_one: bool

    def total_discount(self, type_index: int, s: int) -> float:
        """D^(i)(t+s) for delay s >= 0 under current type i (1-based)."""
        if s == 0:
            return 1.0
        return self.betas[type_index - 1] * self.delta_bar ** s


def discount_representation(config: ModelConfig) -> DiscountRepresentation:
    config = validate(config)
    delta_bar = config.q_bar()
    betas = tuple(d / delta_bar for d in config.deltas)
    return DiscountRepresentation(
        delta_bar=delta_bar,
        betas=betas,
        probabilities=config.p,
        beta_exceeds_one=betas[-1] > 1.0,
    )


# ---------------------------------------------------------------------------
# Policies
# ---------------------------------------------------------------------------

@dataclass
class Policy:
    """Per-period utility values v_t(H^t) on a history tree.

    Dates run 1..T; the date-T value reuses the date-(T-1) history (there
    is no date-T report).  ``root_index`` pins the first coordinate of
    every history (used both by the degenerate-impatience tree, root 1, and
    by the per-initial-type solutions of the general model); ``None`` means
    the tree branches freely at date 1.

    Values live in dense per-date arrays ordered lexicographically by
    history, so iteration and serialisation are deterministic.
    """

    T: int
    n_types: int
    root_index: int | None = None
    values: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        if not self.values:
            self.values = [
                np.full(self._size(t), np.nan) for t in range(1, self.T + 1)
            ]

    def _hist_len(self, t: int) -> int:
        return min(t, self.T - 1)

    def _size(self, t: int) -> int:
        free = self._hist_len(t) - (1 if self.root_index is not None else 0)
        return self.n_types ** free

    def _index(self, t: int, hist: tuple[int, ...]) -> int:
        if not 1 <= t <= self.T:
            raise ValueError(f"date {t} outside 1..{self.T}")
        if len(hist) != self._hist_len(t):
            raise ValueError(
                f"date {t} expects a history of length {self._hist_len(t)}, "
                f"got {hist}")
        if self.root_index is not None:
            if hist[0] != self.root_index:
                raise ValueError(
                    f"history {hist} does not start at the pinned root "
                    f"{self.root_index}")
            return history_index(hist, self.n_types, skip_first=True)
        return history_index(hist, self.n_types)

    def get(self, t: int, hist: tuple[int, ...]) -> float:
        return float(self.values[t - 1][self._index(t, hist)])

    def set(self, t: int, hist: tuple[int, ...], v: float) -> None:
        self.values[t - 1][self._index(t, hist)] = v

    def node_histories(self, t: int) -> list[tuple[int, ...]]:
        """Histories indexing the date-t values, in storage order."""
        length = self._hist_len(t)
        N = self.n_types
        if self.root_index is not None:
            suffixes = _all_tuples(N, length - 1)
            return [(self.root_index,) + s for s in suffixes]
        return _all_tuples(N, length)

    def consumption(self, utility: UtilitySpec, t: int, hist: tuple[int, ...]
                    ) -> float:
        return float(utility.phi(self.get(t, hist)))

    def copy(self) -> "Policy":
        return Policy(self.T, self.n_types, self.root_index,
                      [v.copy() for v in self.values])


def _all_tuples(N: int, length: int) -> list[tuple[int, ...]]:
    if length == 0:
        return [()]
    shorter = _all_tuples(N, length - 1)
    return [s + (n,) for s in shorter for n in range(1, N + 1)]


def continuation_value(policy: Policy, config: ModelConfig,
                       hist: tuple[int, ...]) -> float:
    """Agent-belief expected discounted continuation utility after ``hist``.

    For a date-t history this is E_A[ sum_{tau=t+1..T} (prod_{s=t+1..tau-1}
    delta_s) v_tau ], i.e. the continuation valued in date-(t+1) units.
    """
    t = len(hist)
    if t >= policy.T:
        raise ValueError("no continuation after the terminal date")
    if t == policy.T - 1:
        return policy.get(policy.T, hist)
    total = 0.0
    for n in range(1, config.n_types + 1):
        child = hist + (n,)
        total += config.q[n - 1] * (
            policy.get(t + 1, child)
            + config.delta(n) * continuation_value(policy, config, child)
        )
    return total


def agent_value(policy: Policy, config: ModelConfig, delta1_index: int) -> float:
    """Date-1 expected payoff of truthful reporting under agent beliefs."""
    root = (delta1_index,)
    v1 = policy.get(1, root)
    return v1 + config.delta(delta1_index) * continuation_value(
        policy, config, root)


# ---------------------------------------------------------------------------
# Choice-reversal demonstration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReversalDemo:
    """Outcome of the immediate-vs-delayed reward comparison.

    Problem A: at date t, knowing the current discount factor, choose
    utility ``immediate`` now or ``delayed`` next period; the immediate
    reward is taken exactly when immediate > delta_t * delayed, and
    ``prob_immediate_a`` is the true (firm-belief) probability of that
    event.  Problem B poses the same choice s >= 1 periods ahead; under the
    mean-discount representation the current type cancels, so the choice is
    deterministic: delayed exactly when delayed * delta_bar > immediate.
    """

    prob_immediate_a: float
    choice_b: str
    delta_bar: float
    threshold: float


def choice_reversal_demo(config: ModelConfig, immediate: float, delayed: float,
                         s: int = 1) -> ReversalDemo:
    if immediate <= 0 or delayed <= 0:
        raise ValueError("rewards must be positive utility amounts")
    if s < 1:
        raise ValueError("the delayed problem needs delay s >= 1")
    config = validate(config, allow_boundary_q=True)
    prob_a = sum(
        pn for pn, d in zip(config.p, config.deltas) if immediate > d * delayed
    )
    delta_bar = config.q_bar()
    choice_b = "delayed" if delayed * delta_bar > immediate else "immediate"
    return ReversalDemo(
        prob_immediate_a=float(prob_a),
        choice_b=choice_b,
        delta_bar=delta_bar,
        threshold=immediate / delayed,
    )
