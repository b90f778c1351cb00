"""Tabular finite-horizon MDPs and policies over exact rational arithmetic.

Probabilities and rewards are `fractions.Fraction` throughout so that
distribution equality and return comparisons are decided exactly, never
against a floating-point tolerance. States and actions are identified by
position: the label tuples define the canonical integer ids used everywhere
else in the package.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Iterator, Mapping, Sequence

from .errors import CapExceeded

ZERO = Fraction(0)
ONE = Fraction(1)

# (next state id, probability, reward)
Outcome = tuple[int, Fraction, Fraction]
# A policy cell: (action id, probability) pairs sorted by action id.
Cell = tuple[tuple[int, Fraction], ...]


def rational(value) -> Fraction:
    """Coerce ints, "p/q" strings and Fractions to Fraction; floats are refused."""
    if isinstance(value, (float, bool)):
        raise TypeError(f"exact rational required, got {value!r}")
    return Fraction(value)


@dataclass(frozen=True)
class TabularMDP:
    states: tuple[str, ...]
    actions: tuple[tuple[str, ...], ...]
    transitions: tuple[tuple[tuple[Outcome, ...], ...], ...]
    horizon: int
    initial: tuple[Fraction, ...]
    terminal: frozenset[int]

    @property
    def n_states(self) -> int:
        return len(self.states)

    def index(self, label: str) -> int:
        try:
            return self.states.index(label)
        except ValueError:
            raise KeyError(f"unknown state {label!r}") from None

    def action_index(self, state: int, label: str) -> int:
        try:
            return self.actions[state].index(label)
        except ValueError:
            raise KeyError(
                f"state {self.states[state]!r} has no action {label!r}"
            ) from None

    def is_terminal(self, state: int) -> bool:
        return state in self.terminal

    def nonterminal(self) -> tuple[int, ...]:
        return tuple(s for s in range(self.n_states) if s not in self.terminal)

    def choice_states(self) -> tuple[int, ...]:
        """Non-terminal states where more than one action is available."""
        return tuple(s for s in self.nonterminal() if len(self.actions[s]) > 1)


@dataclass(frozen=True)
class Trajectory:
    """One full episode: T+1 state labels, T action labels, T exact rewards."""

    states: tuple[str, ...]
    actions: tuple[str, ...]
    rewards: tuple[Fraction, ...]


def build_mdp(
    states: Sequence[str],
    actions: Mapping[str, Sequence[str]],
    transitions: Mapping[tuple[str, str], Sequence[tuple]],
    horizon: int,
    initial: Mapping[str, object],
    terminal: Sequence[str] = (),
) -> TabularMDP:
    """Assemble a TabularMDP from label-keyed tables.

    `transitions` maps (state, action) to (next_state, prob, reward) records;
    probabilities and rewards may be ints, "p/q" strings or Fractions.
    Terminal states may omit action and transition entries: the mandatory
    zero-reward self-loop is filled in. Unknown labels are rejected here;
    semantic invariants are checked separately by `validate_mdp`.
    """
    labels = tuple(states)
    idx = {s: i for i, s in enumerate(labels)}
    for s in terminal:
        if s not in idx:
            raise ValueError(f"terminal label {s!r} is not a state")
    term = frozenset(idx[s] for s in terminal)
    for s in actions:
        if s not in idx:
            raise ValueError(f"actions given for unknown state {s!r}")
    for s in initial:
        if s not in idx:
            raise ValueError(f"initial probability given for unknown state {s!r}")

    act_rows = []
    for i, s in enumerate(labels):
        if s in actions:
            act_rows.append(tuple(actions[s]))
        elif i in term:
            act_rows.append(("stay",))
        else:
            act_rows.append(())

    seen = set()
    for (s, a) in transitions:
        if s not in idx:
            raise ValueError(f"transition given for unknown state {s!r}")
        if a not in act_rows[idx[s]]:
            raise ValueError(f"transition for state {s!r} uses unknown action {a!r}")
        seen.add((s, a))

    trans_rows = []
    for i, s in enumerate(labels):
        per_action = []
        for a in act_rows[i]:
            if (s, a) in seen:
                outs = tuple(
                    (idx[nxt], rational(p), rational(r))
                    for nxt, p, r in transitions[(s, a)]
                )
            elif i in term:
                outs = ((i, ONE, ZERO),)
            else:
                outs = ()
            per_action.append(outs)
        trans_rows.append(tuple(per_action))

    init = tuple(rational(initial.get(s, 0)) for s in labels)
    return TabularMDP(labels, tuple(act_rows), tuple(trans_rows), int(horizon), init, term)


def validate_mdp(mdp: TabularMDP) -> list[str]:
    """Return one message per invariant violation; an empty list means valid.

    Violations are data, not failures: callers decide what to do with a
    broken model, so nothing is raised here.
    """
    problems = []
    n = mdp.n_states
    if mdp.horizon < 1:
        problems.append(f"horizon must be a positive integer, got {mdp.horizon}")
    if len(set(mdp.states)) != n:
        dup = sorted({s for s in mdp.states if mdp.states.count(s) > 1})
        problems.append(f"duplicate state labels: {', '.join(dup)}")
    if len(mdp.actions) != n or len(mdp.transitions) != n:
        problems.append("actions/transitions tables do not cover every state")
        return problems

    for s in range(n):
        label = mdp.states[s]
        acts = mdp.actions[s]
        if not acts:
            problems.append(f"state {label} has no available actions")
            continue
        if len(set(acts)) != len(acts):
            problems.append(f"state {label} has duplicate action labels")
        if len(mdp.transitions[s]) != len(acts):
            problems.append(f"state {label} transition table does not cover every action")
            continue
        for a, outs in enumerate(mdp.transitions[s]):
            where = f"({label}, {acts[a]})"
            total = ZERO
            for nxt, p, r in outs:
                if not (0 <= nxt < n):
                    problems.append(f"{where} transitions to out-of-range state id {nxt}")
                if p < 0:
                    problems.append(f"{where} has a negative probability {p}")
                total += p
            if total != 1:
                problems.append(f"probabilities for {where} sum to {total}, expected 1")

    if len(mdp.initial) != n:
        problems.append("initial distribution does not cover every state")
    else:
        if any(p < 0 for p in mdp.initial):
            problems.append("initial distribution has a negative entry")
        total = sum(mdp.initial, ZERO)
        if total != 1:
            problems.append(f"initial distribution sums to {total}, expected 1")

    for s in sorted(mdp.terminal):
        if not (0 <= s < n):
            problems.append(f"terminal state id {s} out of range")
            continue
        label = mdp.states[s]
        if len(mdp.actions[s]) != 1:
            problems.append(f"terminal state {label} must have exactly one action")
        elif mdp.transitions[s][0] != ((s, ONE, ZERO),):
            problems.append(f"terminal state {label} must self-loop with probability 1 and reward 0")
    return problems


@dataclass(frozen=True)
class Policy:
    """Per-timestep action distributions over the MDP's non-terminal states.

    `rows[t]` maps state id to a cell of (action id, probability) pairs
    sorted by action id; deterministic cells are single point masses.
    Stationary policies share one row object across all timesteps, so large
    enumerations stay cheap. Treat instances as immutable.
    """

    kind: str  # "deterministic" | "stochastic"
    horizon: int
    rows: tuple[dict[int, Cell], ...]
    stationary: bool

    def cell(self, t: int, state: int) -> Cell | None:
        return self.rows[t].get(state)

    def describe(self, mdp: TabularMDP) -> str:
        """Canonical human-readable description, listing choice states only."""
        choice = set(mdp.choice_states())

        def fmt(row):
            parts = []
            for s in sorted(row):
                if s not in choice:
                    continue
                entries = row[s]
                if len(entries) == 1 and entries[0][1] == 1:
                    parts.append(f"{mdp.states[s]}={mdp.actions[s][entries[0][0]]}")
                else:
                    inner = ",".join(f"{mdp.actions[s][a]}:{p}" for a, p in entries)
                    parts.append(f"{mdp.states[s]}=({inner})")
            return ",".join(parts) if parts else "(forced)"

        if self.stationary:
            return fmt(self.rows[0]) if self.rows else "(forced)"
        return ";".join(f"t{t}:{fmt(row)}" for t, row in enumerate(self.rows))


def _make_cell(mdp: TabularMDP, state: int, spec) -> Cell:
    if isinstance(spec, str):
        return ((mdp.action_index(state, spec), ONE),)
    entries = sorted((mdp.action_index(state, a), rational(p)) for a, p in spec.items())
    return tuple((a, p) for a, p in entries if p != 0)


def make_stationary(
    mdp: TabularMDP,
    choices: Mapping[str, object] | None = None,
    default: str | None = None,
) -> Policy:
    """Build a stationary policy from per-state action choices.

    `choices[state]` is an action label (point mass) or a {label: prob}
    mapping. States with a single available action are filled automatically;
    `default` names the action to use at any remaining multi-action state.
    """
    choices = dict(choices or {})
    for s in choices:
        if s not in mdp.states:
            raise ValueError(f"choice given for unknown state {s!r}")
    row = {}
    stochastic = False
    for s in mdp.nonterminal():
        label = mdp.states[s]
        spec = choices.get(label)
        if spec is None:
            if len(mdp.actions[s]) == 1:
                spec = mdp.actions[s][0]
            elif default is not None:
                spec = default
            else:
                raise ValueError(f"no action chosen for state {label}")
        cell = _make_cell(mdp, s, spec)
        row[s] = cell
        if not (len(cell) == 1 and cell[0][1] == 1):
            stochastic = True
    kind = "stochastic" if stochastic else "deterministic"
    return Policy(kind, mdp.horizon, (row,) * mdp.horizon, True)


def make_nonstationary(mdp: TabularMDP, per_step: Sequence[Mapping[str, object]]) -> Policy:
    """Build a time-indexed policy from one choices mapping per timestep."""
    if len(per_step) != mdp.horizon:
        raise ValueError(f"expected {mdp.horizon} per-step tables, got {len(per_step)}")
    rows = []
    stochastic = False
    for table in per_step:
        row = {}
        for label, spec in table.items():
            s = mdp.index(label)
            cell = _make_cell(mdp, s, spec)
            row[s] = cell
            if not (len(cell) == 1 and cell[0][1] == 1):
                stochastic = True
        rows.append(row)
    kind = "stochastic" if stochastic else "deterministic"
    return Policy(kind, mdp.horizon, tuple(rows), False)


def validate_policy(mdp: TabularMDP, policy: Policy) -> list[str]:
    """Return invariant violations of `policy` with respect to `mdp`.

    Checks cell-level soundness (available actions, exact sums, point masses
    for deterministic policies) plus coverage: the policy must be defined at
    every non-terminal state reachable under it at every timestep.
    """
    problems = []
    seen_msg = set()

    def add(msg):
        if msg not in seen_msg:
            seen_msg.add(msg)
            problems.append(msg)

    if policy.kind not in ("deterministic", "stochastic"):
        add(f"unknown policy kind {policy.kind!r}")
    if policy.horizon != mdp.horizon:
        add(f"policy horizon {policy.horizon} does not match MDP horizon {mdp.horizon}")
    if len(policy.rows) != policy.horizon:
        add(f"policy has {len(policy.rows)} rows for horizon {policy.horizon}")
        return problems

    checked = set()
    for t, row in enumerate(policy.rows):
        if id(row) in checked:
            continue
        checked.add(id(row))
        for s, entries in row.items():
            if not (0 <= s < mdp.n_states):
                add(f"policy row {t} references out-of-range state id {s}")
                continue
            label = mdp.states[s]
            if mdp.is_terminal(s):
                add(f"policy defines terminal state {label}; terminal actions are forced")
                continue
            if not entries:
                add(f"policy cell for state {label} is empty")
                continue
            acts = [a for a, _ in entries]
            if any(not (0 <= a < len(mdp.actions[s])) for a in acts):
                add(f"policy cell for state {label} uses an unavailable action")
                continue
            if len(set(acts)) != len(acts):
                add(f"policy cell for state {label} repeats an action")
            if any(p <= 0 for _, p in entries):
                add(f"policy cell for state {label} has a non-positive probability")
            if sum(p for _, p in entries) != 1:
                add(f"policy cell for state {label} does not sum to 1")
            if policy.kind == "deterministic" and len(entries) != 1:
                add(f"deterministic policy has a split cell at state {label}")

    if policy.horizon != mdp.horizon:
        return problems

    # Coverage walk: undefined cells are violations only where reachable.
    support = {s for s, p in enumerate(mdp.initial) if p > 0}
    for t in range(mdp.horizon):
        nxt = set()
        for s in support:
            if mdp.is_terminal(s):
                nxt.add(s)
                continue
            entries = policy.rows[t].get(s)
            if entries is None:
                add(f"policy undefined at t={t} for reachable state {mdp.states[s]}")
                continue
            for a, p in entries:
                if p <= 0 or not (0 <= a < len(mdp.actions[s])):
                    continue
                for s2, pr, _ in mdp.transitions[s][a]:
                    if pr > 0:
                        nxt.add(s2)
        support = nxt
    return problems


def enumerate_deterministic_policies(
    mdp: TabularMDP,
    stationary: bool = True,
    cap: int = 1_000_000,
) -> Iterator[Policy]:
    """Yield every deterministic policy over the MDP's non-terminal states.

    Order is lexicographic in action ids over cells (stationary: states in
    id order; nonstationary: (t, state) with t outermost), so enumeration is
    reproducible. After `cap` policies, raises CapExceeded carrying the full
    class size; downstream verdicts must then be scoped to the subset seen.
    """
    nonterm = mdp.nonterminal()
    sizes = [len(mdp.actions[s]) for s in nonterm]
    per_step = prod(sizes)
    total = per_step if stationary else per_step ** mdp.horizon
    count = 0
    if stationary:
        for combo in itertools.product(*(range(k) for k in sizes)):
            if count >= cap:
                raise CapExceeded(total, cap)
            row = {s: ((a, ONE),) for s, a in zip(nonterm, combo)}
            yield Policy("deterministic", mdp.horizon, (row,) * mdp.horizon, True)
            count += 1
    else:
        cells = [(t, s) for t in range(mdp.horizon) for s in nonterm]
        cell_sizes = [len(mdp.actions[s]) for _, s in cells]
        for combo in itertools.product(*(range(k) for k in cell_sizes)):
            if count >= cap:
                raise CapExceeded(total, cap)
            rows = [dict() for _ in range(mdp.horizon)]
            for (t, s), a in zip(cells, combo):
                rows[t][s] = ((a, ONE),)
            yield Policy("deterministic", mdp.horizon, tuple(rows), False)
            count += 1


def policy_class_size(mdp: TabularMDP, stationary: bool = True) -> int:
    """Closed-form size of the deterministic policy class enumerated above."""
    per_step = prod(len(mdp.actions[s]) for s in mdp.nonterminal())
    return per_step if stationary else per_step ** mdp.horizon
