"""Offline dataset simulation: seeded trajectory sampling and empirical
segment statistics, bridging exact distributions and finite samples.

Reproducibility contract: trajectory i of a dataset is drawn from its own
Mersenne Twister generator seeded with the string f"{seed}:{i}" (CPython
seeds strings via SHA-512), so datasets are byte-stable across runs and can
be partitioned across workers without changing the result. Every initial
state, action and transition outcome selection consumes exactly one uniform
draw, resolved by inverse CDF over outcomes in canonical order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import ModelMismatch, PolicyMismatch
from .evaluate import resolve_cell
from .mdp import ZERO, Policy, TabularMDP, Trajectory, validate_policy
from .observation import ObservationModel, ObservedSegment, SegmentDistribution, _crop


@dataclass(frozen=True)
class OfflineDataset:
    trajectories: tuple[Trajectory, ...]
    behavior_id: str
    seed: int

    @property
    def n(self) -> int:
        return len(self.trajectories)


@dataclass(frozen=True)
class EmpiricalSegmentStats:
    """Per window start: observed segments with counts out of n trajectories."""

    model: ObservationModel
    n: int
    per_start: tuple[tuple[int, tuple[tuple[ObservedSegment, int], ...]], ...]

    @property
    def starts(self) -> tuple[int, ...]:
        return tuple(t for t, _ in self.per_start)

    def counts(self, start: int) -> dict[ObservedSegment, int]:
        for t, items in self.per_start:
            if t == start:
                return dict(items)
        raise KeyError(f"no statistics for window start {start}")

    def frequencies(self, start: int) -> dict[ObservedSegment, Fraction]:
        return {seg: Fraction(c, self.n) for seg, c in self.counts(start).items()}


def _pick(rng: random.Random, outcomes):
    """Inverse-CDF draw over (thing, probability) pairs in the given order."""
    x = rng.random()
    acc = ZERO
    for thing, p in outcomes:
        acc += p
        if x < acc:
            return thing
    return outcomes[-1][0]


def sample_dataset(
    mdp: TabularMDP,
    behavior: Policy,
    n: int,
    seed: int,
    behavior_id: str | None = None,
) -> OfflineDataset:
    """Draw n independent trajectories under the behavior policy."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    problems = validate_policy(mdp, behavior)
    if problems:
        raise PolicyMismatch("; ".join(problems))

    initial = tuple((s, p) for s, p in enumerate(mdp.initial) if p > 0)
    trajectories = []
    for i in range(n):
        rng = random.Random(f"{seed}:{i}")
        s = _pick(rng, initial)
        states = [mdp.states[s]]
        actions = []
        rewards = []
        for t in range(mdp.horizon):
            cell = resolve_cell(mdp, behavior, t, s)
            a = _pick(rng, cell)
            outs = tuple(((s2, r), p) for s2, p, r in mdp.transitions[s][a] if p > 0)
            s2, r = _pick(rng, outs)
            actions.append(mdp.actions[s][a])
            rewards.append(r)
            states.append(mdp.states[s2])
            s = s2
        trajectories.append(Trajectory(tuple(states), tuple(actions), tuple(rewards)))
    label = behavior_id if behavior_id is not None else behavior.describe(mdp)
    return OfflineDataset(tuple(trajectories), label, seed)


def empirical_segments(dataset: OfflineDataset, model: ObservationModel) -> EmpiricalSegmentStats:
    """Crop every trajectory at every window start and tally observed segments."""
    phi = model.phi_map
    tallies: dict[int, dict[ObservedSegment, int]] = {t: {} for t in model.window_starts}
    for traj in dataset.trajectories:
        if any(t0 + model.window_length > len(traj.states) - 1 for t0 in model.window_starts):
            raise ModelMismatch(
                f"window start out of range for a trajectory of {len(traj.states) - 1} steps"
            )
        for t0 in model.window_starts:
            try:
                seg = _crop(traj, model, phi, t0)
            except KeyError as exc:
                raise ModelMismatch(f"phi has no feature for state {exc.args[0]!r}") from None
            table = tallies[t0]
            table[seg] = table.get(seg, 0) + 1
    per_start = tuple(
        (t0, tuple(sorted(tallies[t0].items(), key=lambda kv: kv[0].sort_key())))
        for t0 in sorted(model.window_starts)
    )
    return EmpiricalSegmentStats(model, dataset.n, per_start)


def tv_distance(empirical: EmpiricalSegmentStats, exact: SegmentDistribution) -> dict[int, Fraction]:
    """Total-variation distance between empirical frequencies and an exact
    distribution, one exact rational per window start."""
    if empirical.model != exact.model:
        raise ModelMismatch("empirical statistics and exact distribution use different models")
    out = {}
    for start in empirical.starts:
        freqs = empirical.frequencies(start)
        probs = exact.table(start)
        support = set(freqs) | set(probs)
        total = sum(abs(freqs.get(seg, ZERO) - probs.get(seg, ZERO)) for seg in support)
        out[start] = total / 2
    return out
