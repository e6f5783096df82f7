"""JSON documents for MDPs, rewards, policies, orderings and results.

Rationals are written as ``"num/den"`` strings (integers as plain digit
strings) so that files round-trip exactly.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from . import linalg
from .errors import DimensionMismatch, ParseError
from .mdp import MdpSpec, RewardTable, StationaryPolicy, marginalize_reward
from .ordering import PolicyOrdering

fmt = linalg.format_rational


def _rats(values):
    return [fmt(v) for v in values]


def load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ParseError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc


def dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def mdp_to_doc(mdp: MdpSpec) -> dict:
    return {
        "states": list(mdp.state_names) if mdp.state_names is not None else mdp.num_states,
        "actions": list(mdp.action_names) if mdp.action_names is not None else mdp.num_actions,
        "transition": [[_rats(row) for row in per_state] for per_state in mdp.transition],
        "initial": _rats(mdp.initial),
        "discount": fmt(mdp.discount),
    }


def _count_and_names(value, what):
    if isinstance(value, int) and not isinstance(value, bool):
        return value, None
    if isinstance(value, list) and all(isinstance(v, str) for v in value):
        return len(value), tuple(value)
    raise ParseError(f"'{what}' must be a count or a list of names")


def mdp_from_doc(doc: dict) -> MdpSpec:
    try:
        n_s, s_names = _count_and_names(doc["states"], "states")
        n_a, a_names = _count_and_names(doc["actions"], "actions")
        mdp = MdpSpec.build(doc["transition"], doc["initial"], doc["discount"], s_names, a_names)
    except KeyError as exc:
        raise ParseError(f"mdp document lacks field {exc}") from exc
    except (TypeError, IndexError) as exc:
        raise ParseError(f"malformed mdp document: {exc}") from exc
    if mdp.num_states != n_s or mdp.num_actions != n_a:
        raise DimensionMismatch(f"declared {n_s}x{n_a} but transition is {mdp.num_states}x{mdp.num_actions}")
    return mdp


def reward_to_doc(reward: RewardTable, num_actions: int) -> dict:
    return {"reward": [_rats(row) for row in reward.as_matrix(num_actions)]}


def reward_from_doc(doc: dict, mdp: MdpSpec) -> RewardTable:
    """``reward`` is R[s][a]; ``reward3`` is R[s][a][s'] (marginalized here)."""
    if "reward3" in doc:
        return marginalize_reward(mdp, doc["reward3"])
    if "reward" not in doc:
        raise ParseError("reward document needs 'reward' or 'reward3'")
    rows = doc["reward"]
    if len(rows) != mdp.num_states or any(len(r) != mdp.num_actions for r in rows):
        raise DimensionMismatch(f"reward must be {mdp.num_states}x{mdp.num_actions}")
    return RewardTable.from_matrix(rows)


def policies_to_doc(policies) -> dict:
    return {"policies": [{"name": p.name, "probs": [_rats(r) for r in p.action_probs]} for p in policies]}


def policies_from_doc(doc: dict) -> list[StationaryPolicy]:
    try:
        return [StationaryPolicy.build(p["probs"], p.get("name")) for p in doc["policies"]]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed policy document: {exc}") from exc
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def ordering_to_doc(ordering: PolicyOrdering, names=None) -> dict:
    doc = {"classes": ordering.to_list(), "label": ordering.label(names)}
    if ordering.values is not None:
        doc["values"] = _rats(ordering.values)
    return doc


def ordering_from_doc(doc: dict) -> PolicyOrdering:
    try:
        return PolicyOrdering.build(doc["classes"])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed ordering document: {exc}") from exc
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def witness_to_doc(w, names=None) -> dict:
    doc = {"pi": w.pi_index, "pi_prime": w.pi_prime_index}
    if names is not None and w.pi_index >= 0:
        doc["pi_name"], doc["pi_prime_name"] = names[w.pi_index], names[w.pi_prime_index]
    if w.j1_pair is not None:
        doc["j1"] = _rats(w.j1_pair)
    if w.j2_pair is not None:
        doc["j2"] = _rats(w.j2_pair)
    pi = getattr(w, "pi", None)
    if pi is not None:
        doc["pi_probs"] = [_rats(r) for r in pi.action_probs]
        doc["pi_prime_probs"] = [_rats(r) for r in w.pi_prime.action_probs]
        doc["refined"] = w.refined
    return doc


def representability_to_doc(ordering, result, num_actions, names=None, dims=None) -> dict:
    doc = {"ordering": ordering_to_doc(ordering, names), "verdict": result.verdict}
    if result.witness is not None:
        doc["witness"] = reward_to_doc(result.witness, num_actions)["reward"]
    if result.certificate is not None:
        doc["certificate"] = {"lambdas": _rats(result.certificate.lambdas), "mus": _rats(result.certificate.mus)}
    if dims is not None:
        doc["dims"] = dims
    return doc


def simplification_to_doc(se) -> dict:
    return {
        "exists": se.exists,
        "dim_Z": se.dim_Z,
        "dim_F": se.dim_F,
        "rank_F": se.rank_F,
        "partition_sizes": list(se.partition_sizes),
    }


def rationals_from_doc(values) -> tuple[Fraction, ...]:
    return linalg.vec(values)
