
import numpy as np
import pytest
from hypothesis import given, strategies as st

from warmstart import learner
from warmstart.core import Dataset, LoggedEvent, canonicalize, cross_features, features_from_tokens
from warmstart.errors import ConfigError, FormatError, PolicyError, TrainingError
from warmstart.learner import (ArgmaxPolicy, Candidate, LinearModel, TrainConfig, act, choose,
                               format_model, parse_model, select_model, sgd_step, sweep,
                               train_learned, train_naive, train_regressor)
from warmstart.propensity import fit_empirical

ONE = canonicalize([(1, 1.0)])


def test_one_step_hand_gradient():
    m = LinearModel()
    sgd_step(m, ONE, 1.0, 1.0, 0.1)
    assert m.weights == {1: pytest.approx(0.2)}


def test_zero_residual_no_update():
    m = LinearModel({1: 0.4})
    sgd_step(m, ONE, 0.4, 3.0, 0.1)
    assert m.weights == {1: 0.4}


def test_doubling_weight_doubles_step():
    a, b = LinearModel({1: 0.1}), LinearModel({1: 0.1})
    sgd_step(a, ONE, 0.9, 1.0, 0.05)
    sgd_step(b, ONE, 0.9, 2.0, 0.05)
    assert b.weights[1] - 0.1 == pytest.approx(2 * (a.weights[1] - 0.1))


def test_config_validation():
    with pytest.raises(ConfigError):
        TrainConfig(learning_rates=())
    with pytest.raises(ConfigError):
        TrainConfig(learning_rates=(0.1, -1))
    with pytest.raises(ConfigError):
        TrainConfig(passes=0)


def world_log(n_main=200, n_rare=2):
    """Two ads on one page; ad "b" is rarely logged."""
    page = features_from_tokens({"page": 1.0})
    ads = {"a": features_from_tokens({"ad=a": 1.0}), "b": features_from_tokens({"ad=b": 1.0})}
    events = [LoggedEvent("p", "a", 0.2, page, ads["a"])] * n_main
    events += [LoggedEvent("p", "b", 0.9, page, ads["b"])] * n_rare
    order = np.random.default_rng(0).permutation(len(events))
    return Dataset(tuple(events[i] for i in order)), ads


def test_training_is_deterministic():
    data, _ = world_log()
    table = fit_empirical(data)
    cfg = TrainConfig(tau=0.01, seed=4)
    assert train_regressor(data, table, cfg) == train_regressor(data, table, cfg)
    assert format_model(select_model(data, table, cfg)) == format_model(select_model(data, table, cfg))


def test_importance_weighting_helps_rare_action():
    data, ads = world_log()
    table = fit_empirical(data)
    page = data.events[0].context_features
    weighted = train_regressor(data, table, TrainConfig(tau=0.01), 0.002)
    plain = train_regressor(data, None, TrainConfig(tau=0.01, weighted=False), 0.002)
    err = lambda m: (0.9 - m.predict(page, ads["b"])) ** 2
    assert err(weighted) < err(plain)


def test_divergence_is_reported_and_excluded():
    data, _ = world_log()
    table = fit_empirical(data)
    with pytest.raises(TrainingError, match="1e\\+200"):
        train_regressor(data, table, TrainConfig(tau=0.01), 1e200)
    cands = sweep(data, table, TrainConfig(learning_rates=(1e200, 0.01), tau=0.01))
    assert cands[0].diverged and not cands[1].diverged
    assert choose(cands) is cands[1]
    with pytest.raises(TrainingError):
        select_model(data, table, TrainConfig(learning_rates=(1e200,), tau=0.01))


def test_selection_rule():
    m = LinearModel()
    cands = [Candidate(0.2, m, 0.5), Candidate(0.05, m, 0.3), Candidate(0.01, m, 0.3)]
    assert choose(cands).learning_rate == 0.01
    data, _ = world_log()
    table = fit_empirical(data)
    cfg = TrainConfig(tau=0.05)
    errors = [c.train_error for c in sweep(data, table, cfg)]
    best = select_model(data, table, cfg)
    assert learner.training_error(best, data, table, cfg) == min(errors)
    one = TrainConfig(learning_rates=(0.05,), tau=0.05)
    assert select_model(data, table, one) == train_regressor(data, table, one)


def test_parallel_sweep_matches_sequential():
    data, _ = world_log()
    table = fit_empirical(data)
    cfg = TrainConfig(tau=0.05)
    seq = sweep(data, table, cfg)
    par = sweep(data, table, cfg, workers=2)
    assert [c.model for c in seq] == [c.model for c in par]


def scored(scores):
    """Model + candidates whose scores are exactly ``scores``."""
    cands = {a: canonicalize([(i + 1, 1.0)]) for i, a in enumerate(sorted(scores))}
    ctx = canonicalize([(0, 1.0)])
    model = LinearModel({cross_features(ctx, cands[a]).ids[0]: s for a, s in scores.items()})
    return model, ctx, cands


def test_act_examples():
    assert act(*scored({"a": 0.3, "b": 0.7})) == "b"
    assert act(*scored({"c": 0.5, "b": 0.5, "d": 0.5})) == "b"
    _, ctx, cands = scored({"z": 1.0, "m": 2.0})
    assert act(LinearModel(), ctx, cands) == "m"
    with pytest.raises(PolicyError):
        act(LinearModel(), ctx, {})


dyadic = st.integers(-40, 40).map(lambda k: k / 8)


# dyadic scores keep shifts and power-of-two scalings exact, so ties stay ties
@given(st.dictionaries(st.sampled_from("abcdef"), dyadic, min_size=1),
       st.sampled_from([0.125, 0.5, 2.0, 16.0]), dyadic)
def test_argmax_invariance(scores, scale, shift):
    model, ctx, cands = scored(scores)
    base = act(model, ctx, cands)
    scaled = LinearModel({i: w * scale for i, w in model.weights.items()})
    shifted = LinearModel(dict(model.weights), shift)
    assert act(scaled, ctx, cands) == base
    assert act(shifted, ctx, cands) == base


def test_feasible_policy_and_naive():
    data, ads = world_log()
    table = fit_empirical(data)
    catalog = dict(ads, c=features_from_tokens({"ad=c": 1.0}))
    pol = train_learned(data, table, TrainConfig(tau=0.01), catalog)
    assert all(pol(e) in table.feasible_set("p") for e in data)
    assert pol(LoggedEvent("unseen", "a", 0.0)) is None
    with pytest.warns(UserWarning):
        naive = train_naive(data, TrainConfig(tau=0.01), catalog)
    assert not naive.model.weighted and not naive.restrict_to_feasible
    quiet = train_naive(data, TrainConfig(tau=0.01, weighted=False), catalog)
    restricted = ArgmaxPolicy(quiet.model, catalog, table, True)
    unweighted = train_learned(data, table, TrainConfig(tau=0.01, weighted=False), catalog)
    assert [restricted(e) for e in data] == [unweighted(e) for e in data]
    with pytest.raises(ConfigError):
        ArgmaxPolicy(quiet.model, catalog, None, True)


def test_model_file_round_trip(tmp_path):
    m = LinearModel({3: 0.1, 2**64 - 1: -1e-300, 7: 0.0}, 0.25, 0.05, 0.01, 2, False)
    learner.write_model(tmp_path / "m.txt", m)
    back = learner.read_model(tmp_path / "m.txt")
    assert back.weights == {3: 0.1, 2**64 - 1: -1e-300}
    assert (back.intercept, back.learning_rate, back.tau, back.passes, back.weighted) == (0.25, 0.05, 0.01, 2, False)


@pytest.mark.parametrize("text", ["", "#warmstart-model v1\n#tau\t0.1\n",
                                  "#warmstart-model v1\nabc\t1\n", "#warmstart-model v1\n3\tinf\n"])
def test_model_file_errors(text):
    with pytest.raises(FormatError):
        parse_model(text.splitlines(True))
