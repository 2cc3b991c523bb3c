"""Scenario parsing: strict validation and exact round-tripping."""

import json
from fractions import Fraction

import pytest

from dynbal.config import ConfigError, config_from_dict, parse_config
from dynbal.dyadic import Dyadic


def minimal(**overrides) -> dict:
    base = {
        "n": 4,
        "initialLoads": "lineRamp",
        "mode": "continuous",
        "tau": "0.5",
        "k": "0",
        "adversary": "static",
        "algorithm": "deterministic",
    }
    base.update(overrides)
    return base


def test_minimal_config_defaults():
    cfg = config_from_dict(minimal())
    assert cfg.n == 4
    assert cfg.initial_loads == ("lineRamp", {})
    assert cfg.tau == Dyadic(1, 1)
    assert cfg.k == 0
    assert cfg.adversary == ("static", {})
    assert cfg.algorithm == ("deterministic", {})
    assert cfg.trials == 1
    assert cfg.seed == 0
    assert cfg.checks == ()
    assert cfg.check_stride == 1
    assert cfg.trace_level == "summary"
    assert cfg.stop_on_converge is True
    assert cfg.round_budget is None


def test_parse_config_rejects_non_json():
    with pytest.raises(ConfigError, match="not valid JSON"):
        parse_config("{nope")
    with pytest.raises(ConfigError, match="JSON object"):
        parse_config("[1, 2]")


def test_unknown_and_missing_keys():
    with pytest.raises(ConfigError, match="unknown config keys.*budget"):
        config_from_dict(minimal(budget=10))
    raw = minimal()
    del raw["tau"]
    with pytest.raises(ConfigError, match="missing required key 'tau'"):
        config_from_dict(raw)


def test_tau_must_be_dyadic():
    with pytest.raises(ConfigError, match="tau"):
        config_from_dict(minimal(tau="0.1"))
    with pytest.raises(ConfigError, match="tau must be non-negative"):
        config_from_dict(minimal(tau="-1"))


def test_integral_mode_needs_integer_tau():
    raw = minimal(
        mode="integral",
        tau="0.5",
        k="1",
        algorithm={"name": "gaplessGapReduce", "psi": 8},
    )
    with pytest.raises(ConfigError, match="integral mode requires integer tau"):
        config_from_dict(raw)


def test_explicit_loads_parse_exactly():
    cfg = config_from_dict(minimal(initialLoads=[0, "0.25", "3.5", 8]))
    kind, loads = cfg.initial_loads
    assert kind == "explicit"
    assert loads == (Dyadic(0), Dyadic(1, 2), Dyadic(7, 1), Dyadic(8))


def test_explicit_loads_validation():
    with pytest.raises(ConfigError, match="lists 3 loads for n=4"):
        config_from_dict(minimal(initialLoads=[1, 2, 3]))
    with pytest.raises(ConfigError, match="negative"):
        config_from_dict(minimal(initialLoads=[1, 2, 3, "-1"]))
    raw = minimal(
        mode="integral",
        tau="1",
        k="1",
        algorithm={"name": "gaplessGapReduce", "psi": 4},
        initialLoads=[1, 2, 3, "0.5"],
    )
    with pytest.raises(ConfigError, match="integral mode requires integer loads"):
        config_from_dict(raw)


def test_generator_parameter_validation():
    cfg = config_from_dict(minimal(initialLoads={"name": "singleSource", "total": 64}))
    assert cfg.initial_loads == ("singleSource", {"total": 64})
    with pytest.raises(ConfigError, match="exactly one parameter"):
        config_from_dict(minimal(initialLoads={"name": "singleSource"}))
    with pytest.raises(ConfigError, match="needs maxValue"):
        config_from_dict(minimal(initialLoads={"name": "uniformRandom"}))
    with pytest.raises(ConfigError, match="unknown load generator"):
        config_from_dict(minimal(initialLoads="ramp"))


def test_adversary_params():
    cfg = config_from_dict(
        minimal(adversary={"name": "randomConnected", "extraEdgeProb": "0.25"})
    )
    assert cfg.adversary == ("randomConnected", {"extraEdgeProb": Fraction(1, 4)})
    with pytest.raises(ConfigError, match=r"lie in \[0, 1\]"):
        config_from_dict(
            minimal(adversary={"name": "randomConnected", "extraEdgeProb": "2"})
        )
    with pytest.raises(ConfigError, match="unknown adversary"):
        config_from_dict(minimal(adversary="chaos"))


def test_algorithm_params():
    raw = minimal(
        mode="integral",
        tau="0",
        k="1",
        algorithm={"name": "gaplessGapReduce", "psi": 8, "c1": "2.5"},
    )
    cfg = config_from_dict(raw)
    assert cfg.algorithm == ("gaplessGapReduce", {"psi": 8, "c1": Fraction(5, 2)})
    with pytest.raises(ConfigError, match="needs its spread target"):
        config_from_dict(minimal(mode="integral", tau="0", k="1", algorithm={"name": "gaplessGapReduce"}))
    with pytest.raises(ConfigError, match="accepts parameters"):
        config_from_dict(minimal(algorithm={"name": "deterministic", "c1": "2"}))


def test_mode_algorithm_compatibility():
    with pytest.raises(ConfigError, match="supports modes"):
        config_from_dict(minimal(mode="integral", tau="1"))
    with pytest.raises(ConfigError, match="supports modes"):
        config_from_dict(
            minimal(mode="continuous", k="1", algorithm={"name": "gapReduce"})
        )
    with pytest.raises(ConfigError, match="needs continuous mode"):
        config_from_dict(
            minimal(mode="integral", tau="1", k="1", algorithm="continuousViaIntegral")
        )


def test_smoothing_family_needs_positive_k():
    raw = minimal(mode="integral", tau="1", k="0", algorithm="smoothedBalance")
    with pytest.raises(ConfigError, match="positive smoothing amount"):
        config_from_dict(raw)


def test_drivers_need_tau_at_least_one():
    raw = minimal(mode="integral", tau="0", k="1", algorithm="gaplessBalance")
    with pytest.raises(ConfigError, match="needs tau >= 1"):
        config_from_dict(raw)


def test_tau_zero_needs_explicit_budget():
    with pytest.raises(ConfigError, match="set roundBudget"):
        config_from_dict(minimal(tau="0"))
    cfg = config_from_dict(minimal(tau="0", roundBudget=10))
    assert cfg.round_budget == 10


def test_check_validation():
    with pytest.raises(ConfigError, match="unknown invariant check"):
        config_from_dict(minimal(checks=["entropy"]))
    with pytest.raises(ConfigError, match="duplicate check"):
        config_from_dict(minimal(checks=["conservation", "conservation"]))
    raw = minimal(
        mode="integral",
        tau="1",
        k="1",
        algorithm="smoothedBalance",
        checks=["potentialDrop"],
    )
    with pytest.raises(ConfigError, match="only to the deterministic algorithm"):
        config_from_dict(raw)
    with pytest.raises(ConfigError, match="needs the sortingLine adversary"):
        config_from_dict(minimal(checks=["prefixMonotone"]))
    cfg = config_from_dict(
        minimal(adversary="sortingLine", checks=["conservation", "prefixMonotone"])
    )
    assert cfg.checks == ("conservation", "prefixMonotone")


def test_trace_level_forms():
    assert config_from_dict(minimal(traceLevel="full")).trace_level == "full"
    assert config_from_dict(minimal(traceLevel={"sampled": 10})).trace_level == ("sampled", 10)
    with pytest.raises(ConfigError, match="traceLevel"):
        config_from_dict(minimal(traceLevel="verbose"))
    with pytest.raises(ConfigError, match="stride"):
        config_from_dict(minimal(traceLevel={"sampled": 0}))


def test_round_trip_preserves_everything():
    raw = {
        "n": 8,
        "initialLoads": {"name": "uniformRandom", "maxValue": 8, "granularityBits": 3},
        "mode": "continuous",
        "tau": "0.25",
        "k": "1.5",
        "adversary": {"name": "randomConnected", "extraEdgeProb": "0.1"},
        "algorithm": {"name": "continuousViaIntegral", "c1": "2"},
        "roundBudget": 500,
        "trials": 10,
        "seed": 42,
        "checks": ["conservation", "matchingBudget"],
        "checkStride": 5,
        "traceLevel": {"sampled": 25},
        "stopOnConverge": False,
        "maxRejections": 777,
    }
    cfg = config_from_dict(raw)
    again = config_from_dict(json.loads(cfg.to_json()))
    assert again == cfg


def test_round_trip_explicit_loads():
    cfg = config_from_dict(minimal(initialLoads=["0.5", 2, "3.25", 0]))
    again = config_from_dict(cfg.to_dict())
    assert again == cfg
    assert cfg.to_dict()["initialLoads"] == ["0.5", "2", "3.25", "0"]


def test_with_seed():
    cfg = config_from_dict(minimal())
    assert cfg.with_seed(9).seed == 9
    assert cfg.seed == 0
