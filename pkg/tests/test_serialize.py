import json
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from curvlinf.errors import InputError
from curvlinf.serialize import dumps, load, loads
from curvlinf.samples import (make_rng, random_action_algebroid, random_classical_structure,
                              random_mixed_structure, random_retract, random_split_algebroid)
from fixtures import GOLDEN, triple

DATA = Path(__file__).parent / "data"


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_golden_output(name):
    assert dumps(GOLDEN[name]()) == (DATA / name).read_text(encoding="utf-8")


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_golden_load(name):
    obj = load(DATA / name)
    assert obj == GOLDEN[name]()
    assert dumps(obj) == (DATA / name).read_text(encoding="utf-8")


def _raw(name):
    return json.loads((DATA / name).read_text(encoding="utf-8"))


def test_zero_denominator_rejected():
    m = _raw("triple.json")
    m["payload"]["ells"]["1"][0][1]["y"] = "1/0"
    with pytest.raises(InputError) as e:
        loads(json.dumps(m))
    assert e.value.location == "/payload/ells/1/0/1/y"


@pytest.mark.parametrize("bad", ["1.5", "x", "1/", "", "2//3"])
def test_malformed_rationals_rejected(bad):
    m = _raw("triple.json")
    m["payload"]["ells"]["0"][0][1]["z"] = bad
    with pytest.raises(InputError):
        loads(json.dumps(m))


def test_undeclared_symbol_reported_with_location():
    m = _raw("triple.json")
    m["payload"]["ells"]["2"][0][0][1] = "w"
    with pytest.raises(InputError) as e:
        loads(json.dumps(m))
    assert "'w'" in str(e.value)
    assert e.value.location == "/payload/ells/2/0/0/1"


def test_unknown_kind_and_version_rejected():
    m = _raw("abelian.json")
    m["kind"] = "sheaf"
    with pytest.raises(InputError):
        loads(json.dumps(m))
    m = _raw("abelian.json")
    m["format_version"] = 99
    with pytest.raises(InputError):
        loads(json.dumps(m))


def test_invalid_structure_still_loads():
    # loading does not validate the axioms
    assert loads((DATA / "triple_flipped.json").read_text()) == triple(-1)


def _retract(rng):
    return random_retract(rng, random_mixed_structure(rng))


SAMPLERS = [random_classical_structure, random_mixed_structure, _retract,
            random_action_algebroid, random_split_algebroid]


@given(st.sampled_from(SAMPLERS), st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_roundtrip(sampler, seed):
    obj = sampler(make_rng(seed))
    text = dumps(obj)
    back = loads(text)
    assert back == obj
    assert dumps(back) == text
