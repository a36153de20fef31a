import pytest

from lorentz.lorentz_space import VerdictKind
from utils.errors import SchemaError
from workflows.cases import SCOPES, CaseSpec, LorentzPayload, builtin_cases, load_case, parse_case


def test_malformed_json_is_a_schema_error():
    with pytest.raises(SchemaError) as excinfo:
        load_case('{"kind": "lorentz", ')
    assert excinfo.value.exit_code == 2
    assert "malformed JSON" in excinfo.value.message


def test_validation_errors_are_listed():
    with pytest.raises(SchemaError) as excinfo:
        parse_case({"kind": "cylinder", "payload": {}, "samples": 0})
    errors = excinfo.value.details["errors"]
    assert errors
    assert all("loc" in e for e in errors)


@pytest.mark.parametrize("obj", [
    {"kind": "nonsense"},
    {"kind": "clifford", "payload": {"signature": "two,one"}},
    {"kind": "embed", "payload": {"metric": "sphere2"}},
    {"kind": "embed", "payload": {"datum": "torus"}},
    {"kind": "lorentz", "payload": {"g0": [[1, 0], [0, -1]]}},
    {"kind": "lorentz", "payload": {"random": 0}},
    {"kind": "spin", "payload": {"check": "curvature"}},
    {"kind": "cylinder", "payload": {"family": "linear"}, "tol": -1.0},
])
def test_invalid_cases(obj):
    with pytest.raises(SchemaError):
        parse_case(obj)


def test_flat_shorthand_moves_fields_into_payload():
    case = load_case('{"kind": "lorentz", "g0": [[1, 0], [0, -1]], "g1": [[4, 0], [0, -0.25]], '
                     '"expect": "UniqueTimelike", "seed": 3}')
    assert case.seed == 3
    assert set(case.payload) == {"g0", "g1", "expect"}
    typed = case.typed
    assert isinstance(typed, LorentzPayload)
    assert typed.expect == VerdictKind.UNIQUE_TIMELIKE


def test_default_names():
    assert parse_case({"kind": "clifford", "payload": {"signature": "2,1"}}).name == "clifford:2,1"
    assert parse_case({"kind": "spin", "payload": {"check": "killing"}}).name == "spin:killing"
    assert parse_case({"kind": "lorentz", "payload": {"random": 3}}).name == "lorentz:custom"
    assert parse_case({"kind": "cylinder", "name": "mine", "payload": {"family": "linear"}}).name == "mine"


def test_defaults():
    case = CaseSpec(kind="cylinder", payload={"family": "linear"})
    assert case.samples == 20
    assert case.seed == 0
    assert case.tol is None


@pytest.mark.parametrize("scope", SCOPES)
def test_builtin_scopes(scope):
    cases = builtin_cases(scope, seed=5)
    assert cases
    assert all(c.kind == scope for c in cases)
    assert all(c.seed == 5 for c in cases)
    assert len({c.name for c in cases}) == len(cases)


def test_builtin_suite_contents():
    assert len(builtin_cases("clifford")) == sum(n + 1 for n in range(1, 7))
    lorentz = {c.name: c for c in builtin_cases("lorentz")}
    assert lorentz["lorentz:nilpotent"].typed.expect == VerdictKind.UNIQUE_NILPOTENT_NULL
    assert lorentz["lorentz:random2"].typed.random == 50
    embed = {c.name: c for c in builtin_cases("embed")}
    assert embed["embed:flat_negative"].payload["expect_fail"]
    assert len(builtin_cases("all")) == sum(len(builtin_cases(s)) for s in SCOPES)


def test_unknown_scope():
    with pytest.raises(SchemaError):
        builtin_cases("geodesics")
