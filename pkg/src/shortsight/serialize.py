"""JSON document formats for MDPs, observation models, policies and datasets.

Every probability and reward travels as an exact "p/q" string; documents
round-trip exactly (parse(serialize(x)) == x). Parsing is strict: unknown
fields are rejected with the offending field path, syntax errors carry the
line and column, and semantic problems are reported through the same
validators the rest of the package uses.
"""

from __future__ import annotations

import hashlib
import json
import re
from fractions import Fraction

from .errors import ParseError, ValidationError
from .mdp import Policy, TabularMDP, Trajectory, build_mdp, validate_mdp, validate_policy
from .observation import ObservationModel
from .offline import OfflineDataset

_RATIONAL = re.compile(r"^-?\d+(/[1-9]\d*)?$")


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(value, where: str) -> Fraction:
    if not isinstance(value, str) or not _RATIONAL.match(value):
        raise ParseError(f"expected an exact rational string like \"3/4\", got {value!r}", where)
    return Fraction(value)


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno} (char {exc.pos})") from None


def _as_dict(obj, where):
    if not isinstance(obj, dict):
        raise ParseError(f"expected an object, got {type(obj).__name__}", where)
    return obj


def _as_list(obj, where):
    if not isinstance(obj, list):
        raise ParseError(f"expected an array, got {type(obj).__name__}", where)
    return obj


def _as_str(obj, where):
    if not isinstance(obj, str):
        raise ParseError(f"expected a string, got {type(obj).__name__}", where)
    return obj


def _as_int(obj, where):
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise ParseError(f"expected an integer, got {obj!r}", where)
    return obj


def _as_bool(obj, where):
    if not isinstance(obj, bool):
        raise ParseError(f"expected a boolean, got {obj!r}", where)
    return obj


def _check_fields(d: dict, where: str, required: tuple, optional: tuple = ()):
    unknown = sorted(set(d) - set(required) - set(optional))
    if unknown:
        raise ParseError(f"unknown field(s): {', '.join(unknown)}", where)
    missing = sorted(set(required) - set(d))
    if missing:
        raise ParseError(f"missing required field(s): {', '.join(missing)}", where)


# ---------------------------------------------------------------- MDP


def mdp_to_doc(mdp: TabularMDP) -> dict:
    transitions = []
    for s in range(mdp.n_states):
        for a, label in enumerate(mdp.actions[s]):
            for nxt, p, r in mdp.transitions[s][a]:
                transitions.append(
                    {
                        "state": mdp.states[s],
                        "action": label,
                        "next": mdp.states[nxt],
                        "prob": format_rational(p),
                        "reward": format_rational(r),
                    }
                )
    return {
        "states": list(mdp.states),
        "actions": {mdp.states[s]: list(mdp.actions[s]) for s in range(mdp.n_states)},
        "transitions": transitions,
        "horizon": mdp.horizon,
        "initial": {
            mdp.states[s]: format_rational(p) for s, p in enumerate(mdp.initial) if p != 0
        },
        "terminal": [mdp.states[s] for s in sorted(mdp.terminal)],
    }


def mdp_from_doc(doc) -> TabularMDP:
    top = _as_dict(doc, "document")
    _check_fields(
        top, "document",
        required=("states", "actions", "transitions", "horizon", "initial"),
        optional=("terminal",),
    )
    states = [_as_str(s, f"states[{i}]") for i, s in enumerate(_as_list(top["states"], "states"))]
    if len(set(states)) != len(states):
        raise ParseError("duplicate state labels", "states")
    known = set(states)

    actions = {}
    for label, acts in _as_dict(top["actions"], "actions").items():
        if label not in known:
            raise ParseError(f"unknown state {label!r}", "actions")
        actions[label] = tuple(
            _as_str(a, f"actions[{label}][{i}]") for i, a in enumerate(_as_list(acts, f"actions[{label}]"))
        )

    transitions: dict[tuple[str, str], list] = {}
    for i, rec in enumerate(_as_list(top["transitions"], "transitions")):
        where = f"transitions[{i}]"
        rec = _as_dict(rec, where)
        _check_fields(rec, where, required=("state", "action", "next", "prob", "reward"))
        s = _as_str(rec["state"], f"{where}.state")
        a = _as_str(rec["action"], f"{where}.action")
        nxt = _as_str(rec["next"], f"{where}.next")
        if s not in known:
            raise ParseError(f"unknown state {s!r}", f"{where}.state")
        if nxt not in known:
            raise ParseError(f"unknown state {nxt!r}", f"{where}.next")
        if a not in actions.get(s, ()):
            raise ParseError(f"state {s!r} has no action {a!r}", f"{where}.action")
        p = parse_rational(rec["prob"], f"{where}.prob")
        r = parse_rational(rec["reward"], f"{where}.reward")
        transitions.setdefault((s, a), []).append((nxt, p, r))

    horizon = _as_int(top["horizon"], "horizon")
    initial = {}
    for label, p in _as_dict(top["initial"], "initial").items():
        if label not in known:
            raise ParseError(f"unknown state {label!r}", "initial")
        initial[label] = parse_rational(p, f"initial[{label}]")
    terminal = []
    for i, label in enumerate(_as_list(top.get("terminal", []), "terminal")):
        label = _as_str(label, f"terminal[{i}]")
        if label not in known:
            raise ParseError(f"unknown state {label!r}", f"terminal[{i}]")
        terminal.append(label)

    # Ensure every declared action has a transition row, even if empty, so
    # the sum-to-1 check reports it as a validation problem, not a crash.
    for s, acts in actions.items():
        for a in acts:
            transitions.setdefault((s, a), [])

    mdp = build_mdp(states, actions, transitions, horizon, initial, terminal)
    problems = validate_mdp(mdp)
    if problems:
        raise ValidationError(problems)
    return mdp


def serialize_mdp(mdp: TabularMDP) -> str:
    return canonical_json(mdp_to_doc(mdp))


def parse_mdp(text: str) -> TabularMDP:
    return mdp_from_doc(_load_json(text))


# ---------------------------------------------------- Observation model


def model_to_doc(model: ObservationModel) -> dict:
    return {
        "window_length": model.window_length,
        "window_starts": list(model.window_starts),
        "phi": dict(model.phi),
        "observe_actions": model.observe_actions,
        "observe_rewards": model.observe_rewards,
    }


def model_from_doc(doc) -> ObservationModel:
    top = _as_dict(doc, "document")
    _check_fields(
        top, "document",
        required=("window_length", "window_starts", "phi", "observe_actions", "observe_rewards"),
    )
    starts = [
        _as_int(t, f"window_starts[{i}]")
        for i, t in enumerate(_as_list(top["window_starts"], "window_starts"))
    ]
    phi = {
        _as_str(s, "phi"): _as_str(f, f"phi[{s}]")
        for s, f in _as_dict(top["phi"], "phi").items()
    }
    return ObservationModel.make(
        _as_int(top["window_length"], "window_length"),
        starts,
        phi,
        _as_bool(top["observe_actions"], "observe_actions"),
        _as_bool(top["observe_rewards"], "observe_rewards"),
    )


def serialize_model(model: ObservationModel) -> str:
    return canonical_json(model_to_doc(model))


def parse_model(text: str) -> ObservationModel:
    return model_from_doc(_load_json(text))


# ------------------------------------------------------------- Policy


def policy_to_doc(policy: Policy, mdp: TabularMDP) -> dict:
    def row_doc(row):
        return {
            mdp.states[s]: {
                mdp.actions[s][a]: format_rational(p) for a, p in entries
            }
            for s, entries in sorted(row.items())
        }

    rows = [policy.rows[0]] if policy.stationary else list(policy.rows)
    return {
        "kind": policy.kind,
        "horizon": policy.horizon,
        "stationary": policy.stationary,
        "rows": [row_doc(row) for row in rows],
    }


def policy_from_doc(doc, mdp: TabularMDP) -> Policy:
    top = _as_dict(doc, "document")
    _check_fields(top, "document", required=("kind", "horizon", "stationary", "rows"))
    kind = _as_str(top["kind"], "kind")
    horizon = _as_int(top["horizon"], "horizon")
    stationary = _as_bool(top["stationary"], "stationary")
    rows_doc = _as_list(top["rows"], "rows")
    if stationary and len(rows_doc) != 1:
        raise ParseError(f"stationary policy must carry exactly one row, got {len(rows_doc)}", "rows")
    if not stationary and len(rows_doc) != horizon:
        raise ParseError(f"expected {horizon} rows, got {len(rows_doc)}", "rows")

    def parse_row(row_doc, where):
        row = {}
        for label, cell in _as_dict(row_doc, where).items():
            try:
                s = mdp.index(label)
            except KeyError:
                raise ParseError(f"unknown state {label!r}", where) from None
            entries = []
            for a_label, p in _as_dict(cell, f"{where}[{label}]").items():
                try:
                    a = mdp.action_index(s, a_label)
                except KeyError:
                    raise ParseError(
                        f"state {label!r} has no action {a_label!r}", f"{where}[{label}]"
                    ) from None
                entries.append((a, parse_rational(p, f"{where}[{label}][{a_label}]")))
            row[s] = tuple(sorted((a, p) for a, p in entries if p != 0))
        return row

    if stationary:
        row = parse_row(rows_doc[0], "rows[0]")
        policy = Policy(kind, horizon, (row,) * horizon, True)
    else:
        rows = tuple(parse_row(r, f"rows[{t}]") for t, r in enumerate(rows_doc))
        policy = Policy(kind, horizon, rows, False)
    problems = validate_policy(mdp, policy)
    if problems:
        raise ValidationError(problems)
    return policy


def serialize_policy(policy: Policy, mdp: TabularMDP) -> str:
    return canonical_json(policy_to_doc(policy, mdp))


def parse_policy(text: str, mdp: TabularMDP) -> Policy:
    return policy_from_doc(_load_json(text), mdp)


# ------------------------------------------------------------- Dataset


def dataset_to_doc(dataset: OfflineDataset) -> dict:
    return {
        "behavior_id": dataset.behavior_id,
        "seed": dataset.seed,
        "n": dataset.n,
        "trajectories": [
            {
                "states": list(traj.states),
                "actions": list(traj.actions),
                "rewards": [format_rational(r) for r in traj.rewards],
            }
            for traj in dataset.trajectories
        ],
    }


def dataset_from_doc(doc) -> OfflineDataset:
    top = _as_dict(doc, "document")
    _check_fields(top, "document", required=("behavior_id", "seed", "n", "trajectories"))
    n = _as_int(top["n"], "n")
    records = _as_list(top["trajectories"], "trajectories")
    if len(records) != n:
        raise ParseError(f"n is {n} but {len(records)} trajectories are present", "n")
    trajectories = []
    for i, rec in enumerate(records):
        where = f"trajectories[{i}]"
        rec = _as_dict(rec, where)
        _check_fields(rec, where, required=("states", "actions", "rewards"))
        states = tuple(
            _as_str(s, f"{where}.states[{j}]") for j, s in enumerate(_as_list(rec["states"], f"{where}.states"))
        )
        acts = tuple(
            _as_str(a, f"{where}.actions[{j}]") for j, a in enumerate(_as_list(rec["actions"], f"{where}.actions"))
        )
        rewards = tuple(
            parse_rational(r, f"{where}.rewards[{j}]")
            for j, r in enumerate(_as_list(rec["rewards"], f"{where}.rewards"))
        )
        if len(states) != len(acts) + 1 or len(rewards) != len(acts):
            raise ParseError("states/actions/rewards lengths are inconsistent", where)
        trajectories.append(Trajectory(states, acts, rewards))
    return OfflineDataset(
        tuple(trajectories),
        _as_str(top["behavior_id"], "behavior_id"),
        _as_int(top["seed"], "seed"),
    )


def serialize_dataset(dataset: OfflineDataset) -> str:
    return canonical_json(dataset_to_doc(dataset))


def parse_dataset(text: str) -> OfflineDataset:
    return dataset_from_doc(_load_json(text))
