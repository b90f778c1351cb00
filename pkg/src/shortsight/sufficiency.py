"""Window-sufficiency verdicts and objective-consistency reports.

A learning interface is sufficient for an MDP when no two policies in the
enumerated class induce identical observable segment distributions at every
window start while earning different full-horizon returns. When that fails,
the checker returns the lexicographically first violating pair as a witness.
The consistency report compares the policy ordering under a truncated return
against the full-horizon ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import CapExceeded
from .evaluate import step_rewards
from .mdp import Policy, TabularMDP, enumerate_deterministic_policies
from .observation import ObservationModel, _require_model, segment_distribution

DEFAULT_CAP = 10**6


@dataclass(frozen=True)
class PolicyClass:
    """How the quantifier "for any policy" was actually realized."""

    kind: str  # "deterministic-stationary" | "deterministic-nonstationary"
    enumerated: int
    total: int
    truncated: bool

    def describe(self) -> str:
        note = f"{self.kind}, {self.enumerated} enumerated"
        if self.truncated:
            note += f" (truncated; class contains {self.total}; verdict covers the enumerated subset only)"
        return note


@dataclass(frozen=True)
class Witness:
    """Two policies the interface cannot tell apart despite different returns."""

    index_a: int
    index_b: int
    policy_a: Policy
    policy_b: Policy
    return_a: Fraction
    return_b: Fraction

    @property
    def gap(self) -> Fraction:
        return self.return_a - self.return_b


@dataclass(frozen=True)
class SufficiencyVerdict:
    sufficient: bool
    witness: Witness | None
    policy_class: PolicyClass


@dataclass(frozen=True)
class OrderingReport:
    """Agreement between the truncated-return and full-return policy orderings."""

    last_step: int
    truncated_argmax: tuple[int, ...]
    full_argmax: tuple[int, ...]
    best_truncated: Fraction
    best_full: Fraction
    argmax_intersects: bool
    ordering_agrees: bool
    truncated_argmax_descriptions: tuple[str, ...]
    full_argmax_descriptions: tuple[str, ...]
    policy_class: PolicyClass


def _enumerate(mdp: TabularMDP, stationary: bool, cap: int):
    policies: list[Policy] = []
    truncated = False
    total = None
    gen = enumerate_deterministic_policies(mdp, stationary=stationary, cap=cap)
    try:
        for policy in gen:
            policies.append(policy)
    except CapExceeded as exc:
        truncated = True
        total = exc.total
    if total is None:
        total = len(policies)
    kind = "deterministic-stationary" if stationary else "deterministic-nonstationary"
    return policies, PolicyClass(kind, len(policies), total, truncated)


def check_sufficiency(
    mdp: TabularMDP,
    model: ObservationModel,
    stationary: bool = True,
    cap: int = DEFAULT_CAP,
) -> SufficiencyVerdict:
    """Decide whether segment statistics pin down full-horizon returns.

    Enumerated policies are bucketed by their exact SegmentDistribution
    (canonical form, so dict hashing is confirmed by full equality); the
    interface is sufficient iff every bucket carries a single return value.
    Otherwise the witness is the first violating pair (i, j) in enumeration
    order.
    """
    _require_model(mdp, model)
    policies, pclass = _enumerate(mdp, stationary, cap)
    returns: list[Fraction] = []
    buckets: dict[tuple, list[int]] = {}
    for i, policy in enumerate(policies):
        dist = segment_distribution(mdp, policy, model, label=f"policy[{i}]")
        rewards = step_rewards(mdp, policy)
        returns.append(sum(rewards, Fraction(0)))
        buckets.setdefault(dist.per_start, []).append(i)

    best: tuple[int, int] | None = None
    for members in buckets.values():
        if len(members) < 2:
            continue
        found = None
        for pos, i in enumerate(members):
            for j in members[pos + 1 :]:
                if returns[i] != returns[j]:
                    found = (i, j)
                    break
            if found:
                break
        if found is not None and (best is None or found < best):
            best = found

    if best is None:
        return SufficiencyVerdict(True, None, pclass)
    i, j = best
    witness = Witness(i, j, policies[i], policies[j], returns[i], returns[j])
    return SufficiencyVerdict(False, witness, pclass)


def check_objective_consistency(
    mdp: TabularMDP,
    last_step: int,
    stationary: bool = True,
    cap: int = DEFAULT_CAP,
) -> OrderingReport:
    """Compare truncated-return and full-return orderings over the class.

    Both objectives are derived from one forward pass per policy. The
    orderings agree iff for every pair the comparison signs coincide, which
    is checked by grouping on truncated values.
    """
    if last_step < 0:
        raise ValueError(f"last_step must be >= 0, got {last_step}")
    policies, pclass = _enumerate(mdp, stationary, cap)
    keep = min(last_step + 1, mdp.horizon)
    trunc: list[Fraction] = []
    full: list[Fraction] = []
    for policy in policies:
        rewards = step_rewards(mdp, policy)
        trunc.append(sum(rewards[:keep], Fraction(0)))
        full.append(sum(rewards, Fraction(0)))

    best_t = max(trunc)
    best_f = max(full)
    t_argmax = tuple(i for i, v in enumerate(trunc) if v == best_t)
    f_argmax = tuple(i for i, v in enumerate(full) if v == best_f)
    intersects = bool(set(t_argmax) & set(f_argmax))

    order = sorted(range(len(policies)), key=lambda i: trunc[i])
    agrees = True
    prev_t = prev_f = None
    for i in order:
        if prev_t is not None:
            if trunc[i] == prev_t and full[i] != prev_f:
                agrees = False
                break
            if trunc[i] > prev_t and full[i] <= prev_f:
                agrees = False
                break
        prev_t, prev_f = trunc[i], full[i]

    return OrderingReport(
        last_step=last_step,
        truncated_argmax=t_argmax,
        full_argmax=f_argmax,
        best_truncated=best_t,
        best_full=best_f,
        argmax_intersects=intersects,
        ordering_agrees=agrees,
        truncated_argmax_descriptions=tuple(policies[i].describe(mdp) for i in t_argmax),
        full_argmax_descriptions=tuple(policies[i].describe(mdp) for i in f_argmax),
        policy_class=pclass,
    )
