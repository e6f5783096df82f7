import json

import pytest

from hackability import io as hio
from hackability.environments import CleaningSpec, build_cleaning_bandit, build_line_example, build_random_mdp, build_two_state
from hackability.errors import DimensionMismatch, ParseError
from hackability.mdp import RewardTable, validate_mdp
from hackability.ordering import enumerate_weak_orders


def round_trip(doc):
    return json.loads(hio.dump_json(doc))


def test_mdp_round_trip():
    for mdp in (build_two_state(), build_random_mdp(3, 3, seed=2), build_cleaning_bandit(CleaningSpec.build([1, 2], [0, 1]))[0]):
        assert validate_mdp(hio.mdp_from_doc(round_trip(hio.mdp_to_doc(mdp)))) == mdp


def test_reward_round_trip_and_three_index():
    mdp = build_random_mdp(2, 3, seed=1)
    r = RewardTable.from_matrix([["1/3", -2, 0], [5, "7/2", 1]])
    assert hio.reward_from_doc(round_trip(hio.reward_to_doc(r, 3)), mdp) == r
    two = build_two_state()
    got = hio.reward_from_doc({"reward3": [[[0, 1], [0, 1]], [[0, 1], [0, 1]]]}, two)
    assert got.values == (0, 1, 0, 1)
    with pytest.raises(DimensionMismatch):
        hio.reward_from_doc({"reward": [[1, 2]]}, two)
    with pytest.raises(ParseError):
        hio.reward_from_doc({"reward": [[0.5, 1], [1, 1]]}, two)
    with pytest.raises(ParseError):
        hio.reward_from_doc({}, two)


def test_policies_and_orderings_round_trip():
    _, _, _, pi_mix, pi_stay = build_line_example()
    back = hio.policies_from_doc(round_trip(hio.policies_to_doc([pi_mix, pi_stay])))
    assert back == [pi_mix, pi_stay] and back[0].name == pi_mix.name
    for o in enumerate_weak_orders(4):
        assert hio.ordering_from_doc(round_trip(hio.ordering_to_doc(o))) == o


def test_parse_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        hio.load_json(bad)
    with pytest.raises(ParseError):
        hio.load_json(tmp_path / "missing.json")
    with pytest.raises(ParseError):
        hio.mdp_from_doc({"states": 1})
    doc = hio.mdp_to_doc(build_two_state())
    doc["states"] = 3
    with pytest.raises(DimensionMismatch):
        hio.mdp_from_doc(doc)
