"""Three minimal MDP families where a windowed learning interface fails.

Each builder returns a (TabularMDP, ObservationModel) pair:

- "prefix": a single early commitment whose consequence lands after every
  window ends; the bundled feature map hides the commitment flag, so both
  initial actions look identical to the learner.
- "greedy": per-step bonuses for an action that triggers a delayed penalty
  larger than everything it collected; windows see everything, but the
  truncated objective ranks policies in the wrong order.
- "aliasing": two branches whose states are mapped to shared features, so
  windows that start after the branching action carry no trace of which
  branch was taken.

`verify_proposition` re-derives each family's claimed exact values with the
engine and reports a per-claim pass/fail table.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .errors import InvalidParam
from .evaluate import full_return, truncated_return
from .mdp import Policy, TabularMDP, build_mdp, make_stationary, rational
from .observation import (
    ObservationModel,
    distributions_equal,
    identity_phi,
    segment_distribution,
)
from .sufficiency import DEFAULT_CAP, check_objective_consistency, check_sufficiency

FAMILIES = ("prefix", "greedy", "aliasing")


@dataclass(frozen=True)
class CounterexampleSpec:
    family: str
    window_length: int
    penalty: Fraction | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidParam(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.window_length < 1:
            raise InvalidParam(f"window_length must be >= 1, got {self.window_length}")
        if self.family == "greedy":
            if self.penalty is None:
                raise InvalidParam("greedy family requires a penalty M")
            object.__setattr__(self, "penalty", rational(self.penalty))
            if self.penalty <= self.window_length + 1:
                raise InvalidParam(
                    f"penalty must satisfy M > H+1 (here H+1 = {self.window_length + 1}), got {self.penalty}"
                )
        elif self.penalty is not None:
            raise InvalidParam(f"family {self.family!r} takes no penalty")


def build_counterexample(spec: CounterexampleSpec) -> tuple[TabularMDP, ObservationModel]:
    if spec.family == "prefix":
        return build_prefix(spec.window_length)
    if spec.family == "greedy":
        return build_greedy(spec.window_length, spec.penalty)
    return build_aliasing(spec.window_length)


def build_prefix(window_length: int) -> tuple[TabularMDP, ObservationModel]:
    """Commitment chain: choice at s0, outcome revealed only at the last step.

    The commitment is carried by duplicated chain states (s{t}_L / s{t}_R) to
    keep the flat process Markov; the bundled feature map merges the copies,
    so every window starting at t=1 is identical under both commitments.
    """
    h = _positive(window_length)
    chain = list(range(1, h + 2))
    states = ["s0"]
    for side in ("L", "R"):
        states += [f"s{t}_{side}" for t in chain]
    states += ["g", "b"]

    actions = {"s0": ("L", "R")}
    transitions = {
        ("s0", "L"): [("s1_L", 1, 0)],
        ("s0", "R"): [("s1_R", 1, 0)],
    }
    for side in ("L", "R"):
        for t in range(1, h + 1):
            actions[f"s{t}_{side}"] = ("go",)
            transitions[(f"s{t}_{side}", "go")] = [(f"s{t+1}_{side}", 1, 0)]
        actions[f"s{h+1}_{side}"] = ("go",)
    transitions[(f"s{h+1}_L", "go")] = [("g", 1, 1)]
    transitions[(f"s{h+1}_R", "go")] = [("b", 1, 0)]

    mdp = build_mdp(
        states=states,
        actions=actions,
        transitions=transitions,
        horizon=h + 2,
        initial={"s0": 1},
        terminal=("g", "b"),
    )
    phi = {"s0": "s0", "g": "g", "b": "b"}
    for side in ("L", "R"):
        for t in chain:
            phi[f"s{t}_{side}"] = f"s{t}"
    model = ObservationModel.make(h, (1,), phi)
    return mdp, model


def build_greedy(window_length: int, penalty) -> tuple[TabularMDP, ObservationModel]:
    """Bonus-now/penalty-later chain with an absorbing trigger flag.

    Choosing "greedy" anywhere pays +1 immediately and latches the flag;
    the flagged chain ends in a trap worth -penalty, the clean chain in a
    zero-reward safe state, followed by one absorbing pad step. Windows see
    states and rewards; the failure is in the truncated objective itself,
    not in observability.
    """
    h = _positive(window_length)
    m = rational(penalty)
    if m <= h + 1:
        raise InvalidParam(f"penalty must satisfy M > H+1 (here H+1 = {h + 1}), got {m}")

    states = ["s0"]
    for t in range(1, h + 2):
        states += [f"s{t}_clean", f"s{t}_flag"]
    states += ["trap", "safe"]

    actions = {"s0": ("greedy", "patient")}
    transitions = {
        ("s0", "greedy"): [("s1_flag", 1, 1)],
        ("s0", "patient"): [("s1_clean", 1, 0)],
    }
    for t in range(1, h + 1):
        actions[f"s{t}_clean"] = ("greedy", "patient")
        actions[f"s{t}_flag"] = ("greedy", "patient")
        transitions[(f"s{t}_clean", "greedy")] = [(f"s{t+1}_flag", 1, 1)]
        transitions[(f"s{t}_clean", "patient")] = [(f"s{t+1}_clean", 1, 0)]
        transitions[(f"s{t}_flag", "greedy")] = [(f"s{t+1}_flag", 1, 1)]
        transitions[(f"s{t}_flag", "patient")] = [(f"s{t+1}_flag", 1, 0)]
    actions[f"s{h+1}_clean"] = ("go",)
    actions[f"s{h+1}_flag"] = ("go",)
    transitions[(f"s{h+1}_clean", "go")] = [("safe", 1, 0)]
    transitions[(f"s{h+1}_flag", "go")] = [("trap", 1, -m)]

    mdp = build_mdp(
        states=states,
        actions=actions,
        transitions=transitions,
        horizon=h + 3,
        initial={"s0": 1},
        terminal=("trap", "safe"),
    )
    phi = {"s0": "s0", "trap": "trap", "safe": "safe"}
    for t in range(1, h + 2):
        phi[f"s{t}_clean"] = f"s{t}"
        phi[f"s{t}_flag"] = f"s{t}"
    starts = tuple(range(0, mdp.horizon - h + 1))
    model = ObservationModel.make(h, starts, phi)
    return mdp, model


def build_aliasing(window_length: int) -> tuple[TabularMDP, ObservationModel]:
    """Two branches collapsed to shared features inside every window.

    The branch states u{t} and v{t} are mapped to one feature w{t} for the
    whole branch length, and windows start only at t=1, after the branching
    action; the terminals that reveal the value difference sit past every
    window's end.
    """
    h = _positive(window_length)
    states = ["s0"]
    states += [f"u{t}" for t in range(1, h + 2)]
    states += [f"v{t}" for t in range(1, h + 2)]
    states += ["g", "b"]

    actions = {"s0": ("L", "R")}
    transitions = {
        ("s0", "L"): [("u1", 1, 0)],
        ("s0", "R"): [("v1", 1, 0)],
    }
    for branch in ("u", "v"):
        for t in range(1, h + 1):
            actions[f"{branch}{t}"] = ("go",)
            transitions[(f"{branch}{t}", "go")] = [(f"{branch}{t+1}", 1, 0)]
        actions[f"{branch}{h+1}"] = ("go",)
    transitions[(f"u{h+1}", "go")] = [("g", 1, 1)]
    transitions[(f"v{h+1}", "go")] = [("b", 1, 0)]

    mdp = build_mdp(
        states=states,
        actions=actions,
        transitions=transitions,
        horizon=h + 2,
        initial={"s0": 1},
        terminal=("g", "b"),
    )
    phi = {"s0": "s0", "g": "g", "b": "b"}
    for t in range(1, h + 2):
        phi[f"u{t}"] = f"w{t}"
        phi[f"v{t}"] = f"w{t}"
    model = ObservationModel.make(h, (1,), phi)
    return mdp, model


def commit_policies(mdp: TabularMDP) -> tuple[Policy, Policy]:
    """The two stationary policies of the prefix/aliasing families (L first)."""
    return make_stationary(mdp, {"s0": "L"}), make_stationary(mdp, {"s0": "R"})


def greedy_policies(mdp: TabularMDP) -> tuple[Policy, Policy]:
    """(all-greedy, all-patient) for the greedy family."""
    return make_stationary(mdp, default="greedy"), make_stationary(mdp, default="patient")


def _positive(window_length: int) -> int:
    h = int(window_length)
    if h < 1:
        raise InvalidParam(f"window_length must be >= 1, got {window_length}")
    return h


@dataclass(frozen=True)
class ClaimCheck:
    description: str
    expected: str
    computed: str
    passed: bool


@dataclass(frozen=True)
class PropositionReport:
    proposition: int
    family: str
    window_length: int
    penalty: Fraction | None
    checks: tuple[ClaimCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _value_claim(description, expected, computed) -> ClaimCheck:
    return ClaimCheck(description, str(expected), str(computed), expected == computed)


def _flag_claim(description, true_word, false_word, expected, computed) -> ClaimCheck:
    return ClaimCheck(
        description,
        true_word if expected else false_word,
        true_word if computed else false_word,
        computed == expected,
    )


def verify_proposition(
    proposition: int,
    window_length: int,
    penalty=None,
    cap: int = DEFAULT_CAP,
) -> PropositionReport:
    """Re-derive one proposition's exact claims and report each check."""
    if proposition == 1:
        return _verify_prefix(window_length, cap)
    if proposition == 2:
        return _verify_greedy(window_length, penalty, cap)
    if proposition == 3:
        return _verify_aliasing(window_length, cap)
    raise InvalidParam(f"proposition must be 1, 2 or 3, got {proposition}")


def _verify_prefix(h: int, cap: int) -> PropositionReport:
    mdp, model = build_prefix(h)
    pol_l, pol_r = commit_policies(mdp)
    dist_l = segment_distribution(mdp, pol_l, model, label="commit-L")
    dist_r = segment_distribution(mdp, pol_r, model, label="commit-R")
    equal = distributions_equal(dist_l, dist_r)
    ret_l = full_return(mdp, pol_l)
    ret_r = full_return(mdp, pol_r)
    verdict = check_sufficiency(mdp, model, cap=cap)

    checks = [
        _flag_claim(
            "segment distributions under the L and R commitments",
            "equal", "different", True, equal,
        ),
        _value_claim("full return of the L-commit policy", Fraction(1), ret_l),
        _value_claim("full return of the R-commit policy", Fraction(0), ret_r),
        _flag_claim(
            "window statistics identify the optimal policy",
            "sufficient", "not sufficient", False, verdict.sufficient,
        ),
        _flag_claim(
            "witness pair is (commit-L, commit-R) with returns (1, 0)",
            "yes", "no", True,
            verdict.witness is not None
            and verdict.witness.policy_a == pol_l
            and verdict.witness.policy_b == pol_r
            and verdict.witness.return_a == 1
            and verdict.witness.return_b == 0,
        ),
    ]
    control = replace(model, window_starts=tuple(sorted({0, *model.window_starts})))
    control_verdict = check_sufficiency(mdp, control, cap=cap)
    checks.append(
        _flag_claim(
            "control: a window covering the initial action restores sufficiency",
            "sufficient", "not sufficient", True, control_verdict.sufficient,
        )
    )
    return PropositionReport(1, "prefix", h, None, tuple(checks))


def _verify_greedy(h: int, penalty, cap: int) -> PropositionReport:
    if penalty is None:
        raise InvalidParam("proposition 2 requires a penalty M")
    m = rational(penalty)
    mdp, _ = build_greedy(h, m)
    all_greedy, all_patient = greedy_policies(mdp)
    trunc_greedy = truncated_return(mdp, all_greedy, h)
    trunc_patient = truncated_return(mdp, all_patient, h)
    ret_greedy = full_return(mdp, all_greedy)
    ret_patient = full_return(mdp, all_patient)
    report = check_objective_consistency(mdp, h, cap=cap)

    checks = [
        _value_claim("truncated return of all-greedy (steps 0..H)", Fraction(h + 1), trunc_greedy),
        _value_claim("truncated-return maximum over the class", Fraction(h + 1), report.best_truncated),
        _value_claim("truncated return of all-patient", Fraction(0), trunc_patient),
        _value_claim("full return of all-greedy", Fraction(h + 1) - m, ret_greedy),
        _value_claim("full return of all-patient", Fraction(0), ret_patient),
        _value_claim("full-return maximum over the class", Fraction(0), report.best_full),
        _flag_claim(
            "truncated and full argmax sets",
            "overlapping", "disjoint", False, report.argmax_intersects,
        ),
        _flag_claim(
            "truncated ordering matches the full ordering",
            "yes", "no", False, report.ordering_agrees,
        ),
        _value_claim("suboptimality gap J(all-patient) - J(all-greedy)", m - (h + 1), ret_patient - ret_greedy),
    ]
    return PropositionReport(2, "greedy", h, m, tuple(checks))


def _verify_aliasing(h: int, cap: int) -> PropositionReport:
    mdp, model = build_aliasing(h)
    pol_l, pol_r = commit_policies(mdp)
    dist_l = segment_distribution(mdp, pol_l, model, label="branch-L")
    dist_r = segment_distribution(mdp, pol_r, model, label="branch-R")
    equal = distributions_equal(dist_l, dist_r)
    ret_l = full_return(mdp, pol_l)
    ret_r = full_return(mdp, pol_r)
    verdict = check_sufficiency(mdp, model, cap=cap)

    checks = [
        _flag_claim(
            "segment distributions under the aliased feature map",
            "equal", "different", True, equal,
        ),
        _value_claim("full return of the L-branch policy", Fraction(1), ret_l),
        _value_claim("full return of the R-branch policy", Fraction(0), ret_r),
        _flag_claim(
            "window statistics identify the optimal policy",
            "sufficient", "not sufficient", False, verdict.sufficient,
        ),
        _flag_claim(
            "witness pair is (branch-L, branch-R) with returns (1, 0)",
            "yes", "no", True,
            verdict.witness is not None
            and verdict.witness.policy_a == pol_l
            and verdict.witness.policy_b == pol_r
            and verdict.witness.return_a == 1
            and verdict.witness.return_b == 0,
        ),
    ]
    control = ObservationModel.make(
        model.window_length,
        model.window_starts,
        identity_phi(mdp),
        model.observe_actions,
        model.observe_rewards,
    )
    control_verdict = check_sufficiency(mdp, control, cap=cap)
    checks.append(
        _flag_claim(
            "control: the identity feature map restores sufficiency",
            "sufficient", "not sufficient", True, control_verdict.sufficient,
        )
    )
    return PropositionReport(3, "aliasing", h, None, tuple(checks))
