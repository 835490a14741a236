"""Reward-timing reversals from stochastic discounting.

An agent with a two-point discount factor (0.4 or 0.9) prefers 50 utils
now over 100 utils tomorrow whenever today's draw is impatient, yet
always takes the 100 when the same choice sits several periods ahead:
today's draw cancels out of any comparison between two future dates, so
only the mean future discount matters.  No time inconsistency needed.
"""

from creditscreen import (
    Income,
    IncomeKind,
    ModelConfig,
    choice_reversal_demo,
    discount_representation,
    sqrt_power,
)

shared = ModelConfig(
    T=3, deltas=(0.4, 0.9), p=(0.75, 0.25), q=(0.75, 0.25), R=1.0,
    income=Income(IncomeKind.TOTAL_NPV, 3.0), utility=sqrt_power())

demo = choice_reversal_demo(shared, immediate=50.0, delayed=100.0, s=2)
print("shared beliefs (3/4 impatient, 1/4 patient):")
print(f"  choose-now problem:     immediate with probability "
      f"{demo.prob_immediate_a}")
print(f"  choose-later problem:   {demo.choice_b} always "
      f"(mean discount {demo.delta_bar})")

rep = discount_representation(shared)
print(f"  mean-discount representation: beta = "
      f"({rep.betas[0]:.6f}, {rep.betas[1]:.6f})")
print(f"  top beta exceeds one: {rep.beta_exceeds_one} -- so this is not a "
      f"random quasi-hyperbolic family")

# Firms certain of impatience strengthen the reversal: the immediate
# reward is now taken for sure, while the deferred choice is unchanged.
certain = ModelConfig(
    T=3, deltas=(0.4, 0.9), p=(1.0, 0.0), q=(0.75, 0.25), R=1.0,
    income=Income(IncomeKind.TOTAL_NPV, 3.0), utility=sqrt_power())
demo2 = choice_reversal_demo(certain, 50.0, 100.0)
print("\nfirm-certain impatience (p = (1, 0)):")
print(f"  choose-now problem:     immediate with probability "
      f"{demo2.prob_immediate_a}")
print(f"  choose-later problem:   {demo2.choice_b} always")

# A pessimistic enough agent flips the deferred choice too.
pessimist = ModelConfig(
    T=3, deltas=(0.4, 0.9), p=(0.99, 0.01), q=(0.99, 0.01), R=1.0,
    income=Income(IncomeKind.TOTAL_NPV, 3.0), utility=sqrt_power())
demo3 = choice_reversal_demo(pessimist, 50.0, 100.0)
print(f"\nnear-certain impatience in beliefs (mean discount "
      f"{demo3.delta_bar:.3f}): deferred choice becomes {demo3.choice_b}")
