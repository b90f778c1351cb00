"""The windowed learning interface: what a segment-restricted learner sees.

An ObservationModel fixes the window length, the allowed window start times,
a feature map over states (which may alias distinct states), and whether
actions and rewards are visible inside windows. `segment_distribution`
computes the exact probability mass over observable segments for a policy,
one normalized distribution per window start, with no sampling involved.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Mapping

from .errors import InvalidTrajectory, ModelMismatch, PolicyMismatch
from .evaluate import forward, resolve_cell
from .mdp import ZERO, Policy, TabularMDP, Trajectory


@dataclass(frozen=True)
class ObservationModel:
    window_length: int
    window_starts: tuple[int, ...]
    phi: tuple[tuple[str, str], ...]  # sorted (state label, feature) pairs
    observe_actions: bool = True
    observe_rewards: bool = True

    @classmethod
    def make(
        cls,
        window_length: int,
        window_starts,
        phi: Mapping[str, str],
        observe_actions: bool = True,
        observe_rewards: bool = True,
    ) -> "ObservationModel":
        return cls(
            window_length=int(window_length),
            window_starts=tuple(sorted(set(int(t) for t in window_starts))),
            phi=tuple(sorted((str(s), str(f)) for s, f in phi.items())),
            observe_actions=bool(observe_actions),
            observe_rewards=bool(observe_rewards),
        )

    @property
    def phi_map(self) -> dict[str, str]:
        return dict(self.phi)


def identity_phi(mdp: TabularMDP) -> dict[str, str]:
    """The feature map that observes states as themselves."""
    return {s: s for s in mdp.states}


def all_window_starts(mdp: TabularMDP, window_length: int) -> tuple[int, ...]:
    """Every start time t with a complete window: 0 <= t and t + H <= T."""
    return tuple(range(0, mdp.horizon - window_length + 1))


def coarsen(model: ObservationModel, merge: Mapping[str, str]) -> ObservationModel:
    """Compose the feature map with `merge` (features absent from `merge` pass through)."""
    phi = {s: merge.get(f, f) for s, f in model.phi}
    return replace(model, phi=tuple(sorted(phi.items())))


def validate_model(mdp: TabularMDP, model: ObservationModel) -> list[str]:
    problems = []
    if model.window_length < 1:
        problems.append(f"window_length must be >= 1, got {model.window_length}")
    if not model.window_starts:
        problems.append("window_starts is empty")
    for t in model.window_starts:
        if t < 0 or t + model.window_length > mdp.horizon:
            problems.append(
                f"window start {t} out of range for length {model.window_length} and horizon {mdp.horizon}"
            )
    mapped = {s for s, _ in model.phi}
    missing = [s for s in mdp.states if s not in mapped]
    if missing:
        problems.append(f"phi is not total: no feature for {', '.join(missing)}")
    extra = sorted(mapped - set(mdp.states))
    if extra:
        problems.append(f"phi maps unknown states: {', '.join(extra)}")
    return problems


def _require_model(mdp: TabularMDP, model: ObservationModel) -> None:
    problems = validate_model(mdp, model)
    if problems:
        raise ModelMismatch("; ".join(problems))


@dataclass(frozen=True)
class ObservedSegment:
    """One cropped, feature-mapped window: H+1 features spanning H transitions."""

    start: int
    features: tuple[str, ...]
    actions: tuple[str, ...] | None
    rewards: tuple[Fraction, ...] | None

    def sort_key(self):
        return (self.features, self.actions or (), self.rewards or ())


@dataclass(frozen=True)
class SegmentDistribution:
    """Exact per-start distributions over observable segments.

    `per_start` is canonical: starts ascending, segments sorted by
    `ObservedSegment.sort_key`, probabilities exact. Two distributions over
    the same model are equal iff their `per_start` tuples are equal.
    """

    model: ObservationModel
    policy_id: str
    per_start: tuple[tuple[int, tuple[tuple[ObservedSegment, Fraction], ...]], ...]

    @property
    def starts(self) -> tuple[int, ...]:
        return tuple(t for t, _ in self.per_start)

    def table(self, start: int) -> dict[ObservedSegment, Fraction]:
        for t, items in self.per_start:
            if t == start:
                return dict(items)
        raise KeyError(f"no distribution for window start {start}")


def observe(mdp: TabularMDP, trajectory: Trajectory, model: ObservationModel) -> list[ObservedSegment]:
    """Crop one trajectory into its observable segments, one per window start."""
    _require_model(mdp, model)
    _check_trajectory(mdp, trajectory)
    phi = model.phi_map
    return [_crop(trajectory, model, phi, t0) for t0 in model.window_starts]


def _crop(trajectory: Trajectory, model: ObservationModel, phi, t0: int) -> ObservedSegment:
    hi = t0 + model.window_length
    features = tuple(phi[s] for s in trajectory.states[t0 : hi + 1])
    acts = tuple(trajectory.actions[t0:hi]) if model.observe_actions else None
    rews = tuple(trajectory.rewards[t0:hi]) if model.observe_rewards else None
    return ObservedSegment(t0, features, acts, rews)


def _check_trajectory(mdp: TabularMDP, trajectory: Trajectory) -> None:
    T = mdp.horizon
    if len(trajectory.states) != T + 1 or len(trajectory.actions) != T or len(trajectory.rewards) != T:
        raise InvalidTrajectory(
            f"trajectory shape ({len(trajectory.states)} states, {len(trajectory.actions)} actions, "
            f"{len(trajectory.rewards)} rewards) does not fit horizon {T}"
        )
    idx = {s: i for i, s in enumerate(mdp.states)}
    for t in range(T):
        s_label, a_label, nxt_label = trajectory.states[t], trajectory.actions[t], trajectory.states[t + 1]
        if s_label not in idx or nxt_label not in idx:
            raise InvalidTrajectory(f"unknown state label at step {t}")
        s = idx[s_label]
        if a_label not in mdp.actions[s]:
            raise InvalidTrajectory(f"action {a_label!r} unavailable at state {s_label} (step {t})")
        a = mdp.actions[s].index(a_label)
        nxt = idx[nxt_label]
        r = trajectory.rewards[t]
        if not any(s2 == nxt and p > 0 and rew == r for s2, p, rew in mdp.transitions[s][a]):
            raise InvalidTrajectory(
                f"step {t}: ({s_label}, {a_label}) -> {nxt_label} with reward {r} is not supported"
            )


def segment_distribution(
    mdp: TabularMDP,
    policy: Policy,
    model: ObservationModel,
    label: str | None = None,
) -> SegmentDistribution:
    """Exact distribution over observable segments per window start.

    Computed by forward DP over (state, observed prefix) pairs: paths that
    agree on everything the model lets through are merged as soon as they
    meet in the same underlying state, so aliasing collapses mass exactly
    where the learner cannot tell trajectories apart.
    """
    _require_model(mdp, model)
    if policy.horizon != mdp.horizon:
        raise PolicyMismatch(
            f"policy horizon {policy.horizon} does not match MDP horizon {mdp.horizon}"
        )
    phi_ix = tuple(model.phi_map[s] for s in mdp.states)
    max_start = max(model.window_starts)
    _, dists = forward(mdp, policy, max_start)

    per_start = []
    for t0 in sorted(model.window_starts):
        frontier: dict[tuple, Fraction] = {}
        for s, p in dists[t0].items():
            key = (s, (phi_ix[s],), (), ())
            frontier[key] = frontier.get(key, ZERO) + p
        for step in range(model.window_length):
            t = t0 + step
            nxt: dict[tuple, Fraction] = {}
            for (s, feats, acts, rews), p in frontier.items():
                for a, q in resolve_cell(mdp, policy, t, s):
                    w0 = p if q == 1 else p * q
                    a_label = mdp.actions[s][a]
                    for s2, pr, r in mdp.transitions[s][a]:
                        if pr == 0:
                            continue
                        w = w0 if pr == 1 else w0 * pr
                        key = (
                            s2,
                            feats + (phi_ix[s2],),
                            acts + (a_label,) if model.observe_actions else acts,
                            rews + (r,) if model.observe_rewards else rews,
                        )
                        nxt[key] = nxt.get(key, ZERO) + w
            frontier = nxt
        table: dict[ObservedSegment, Fraction] = {}
        for (s, feats, acts, rews), p in frontier.items():
            seg = ObservedSegment(
                t0,
                feats,
                acts if model.observe_actions else None,
                rews if model.observe_rewards else None,
            )
            table[seg] = table.get(seg, ZERO) + p
        items = tuple(sorted(table.items(), key=lambda kv: kv[0].sort_key()))
        per_start.append((t0, items))

    policy_id = label if label is not None else policy.describe(mdp)
    return SegmentDistribution(model=model, policy_id=policy_id, per_start=tuple(per_start))


def distributions_equal(a: SegmentDistribution, b: SegmentDistribution) -> bool:
    """Exact equality of segment distributions at every window start."""
    if a.model != b.model:
        raise ModelMismatch("segment distributions come from different observation models")
    return a.per_start == b.per_start
