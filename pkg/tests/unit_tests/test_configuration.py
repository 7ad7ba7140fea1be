import numpy as np
import pytest

from search_graph.configuration import Alphabet, GaConfiguration
from shared.configuration import WORKERS_ENV, BaseConfiguration
from sweep_graph.configuration import SweepConfiguration


def test_configuration_empty() -> None:
    BaseConfiguration.from_runnable_config({})


def test_ga_defaults_match_reference_run() -> None:
    cfg = GaConfiguration.from_runnable_config({})
    assert cfg.population_size == 1000
    assert cfg.mutation_prob == 0.2
    assert cfg.crossover_prob == 0.4
    assert cfg.elite_fraction == 0.01
    assert cfg.elite_count == 10
    assert cfg.max_generations == 200
    assert cfg.alphabet == Alphabet(lo=-2.0, hi=2.0, step=1.0)
    assert cfg.clamp_mode == "clamped"
    assert cfg.early_exit_on_zero


def test_from_runnable_config_ignores_unknown_keys() -> None:
    cfg = GaConfiguration.from_runnable_config(
        {"configurable": {"population_size": 50, "thread_id": "abc", "bin_width": 7}}
    )
    assert cfg.population_size == 50


def test_to_configurable_round_trips() -> None:
    cfg = GaConfiguration(population_size=30, rng_seed=9, workers=2)
    again = GaConfiguration.from_runnable_config({"configurable": cfg.to_configurable()})
    assert again == cfg


def test_elite_count_rounds_up() -> None:
    assert GaConfiguration(population_size=10).elite_count == 1
    assert GaConfiguration(population_size=101).elite_count == 2
    assert GaConfiguration(population_size=10, elite_fraction=0.0).elite_count == 0
    assert GaConfiguration(population_size=300, elite_fraction=0.07).elite_count == 21


@pytest.mark.parametrize(
    "overrides",
    [
        {"population_size": 1},
        {"mutation_prob": 1.5},
        {"crossover_prob": -0.1},
        {"elite_fraction": 1.0},
        {"max_generations": 0},
        {"clamp_mode": "wrapped"},
        {"snapshot_every": -1},
        {"workers": 0},
        {"violation_limit": -1},
        {"violation_limit": 0},
    ],
)
def test_ga_configuration_rejects(overrides: dict) -> None:
    with pytest.raises(ValueError):
        GaConfiguration(**overrides)


def test_workers_default_comes_from_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv(WORKERS_ENV, "3")
    assert GaConfiguration().workers == 3
    monkeypatch.delenv(WORKERS_ENV)
    assert GaConfiguration().workers == 1


def test_sweep_defaults_and_validation() -> None:
    cfg = SweepConfiguration.from_runnable_config({})
    assert (cfg.bin_width, cfg.bin_count, cfg.max_concurrency) == (200, 5, 4)
    for overrides in ({"bin_width": 0}, {"bin_count": 0}, {"max_concurrency": 0}):
        with pytest.raises(ValueError):
            SweepConfiguration(**overrides)


def test_alphabet_values() -> None:
    alphabet = Alphabet(lo=-1.0, hi=1.0, step=0.5)
    assert alphabet.size == 5
    np.testing.assert_array_equal(alphabet.values, [-1.0, -0.5, 0.0, 0.5, 1.0])
    np.testing.assert_array_equal(
        alphabet.contains(np.array([-1.0, 0.25, 1.5, 0.5])), [True, False, False, True]
    )


@pytest.mark.parametrize(
    "lo,hi,step",
    [(1.0, 1.0, 1.0), (2.0, -2.0, 1.0), (-1.0, 1.0, 0.0), (0.0, 1.0, 0.3)],
)
def test_alphabet_rejects(lo: float, hi: float, step: float) -> None:
    with pytest.raises(ValueError):
        Alphabet(lo=lo, hi=hi, step=step)
