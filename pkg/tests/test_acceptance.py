"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line."""
import math
import time

import numpy as np
import pytest

from warmstart import cli, learner, propensity
from warmstart import simworld as sw
from warmstart.core import SparseVector, cross_features
from warmstart.estimator import confidence_interval
from warmstart.learner import LinearModel, TrainConfig


def verdict(report_line, n, name, ok, detail):
    report_line(f"{'PASS' if ok else 'FAIL'}  criterion {n} ({name}): {detail}")
    assert ok, detail


def test_1_mixture_equivalence(report_line):
    start = time.perf_counter()
    worst, count = 0.0, 0
    for seed in range(60):
        kind = sw.BERNOULLI if seed % 5 == 4 else sw.DETERMINISTIC
        T = 2 if kind == sw.BERNOULLI else 1 + seed % 4
        inst = sw.random_instance(seed, 1 + seed % 3, 1 + (seed // 3) % 3, T, reward_kind=kind,
                                  deterministic_logging=seed % 7 == 0)
        brute = sw.enumerate_estimator_mean(inst.world, inst.seq, inst.h, inst.pi_hat, inst.tau)
        exact = sw.exact_estimator_expectation(inst.world, inst.seq, inst.h, inst.pi_hat, inst.tau)
        worst = max(worst, abs(brute - exact))
        count += 1
    elapsed = time.perf_counter() - start
    ok = count >= 50 and worst <= 1e-12 and elapsed < 10
    verdict(report_line, 1, "mixture equivalence", ok,
            f"{count} worlds, max |diff| = {worst:.2e} (tol 1e-12), {elapsed:.2f}s (< 10s)")


def tightness_error(tau, eps):
    world = sw.SyntheticWorld(["x"], [1.0], ["a1", "a2"], [[1.0, 1.0]])
    pi = np.array([[tau + eps, 1 - tau - eps]])
    pi_hat = np.array([[tau, 1 - tau]])
    mean = sw.exact_estimator_expectation(world, pi, [0], pi_hat, tau)
    return mean, mean - sw.exact_policy_value(world, [0])


def test_2_tightness(report_line):
    mean, err = tightness_error(0.1, 0.05)
    worst = 0.0
    for tau in (0.02, 0.05, 0.1, 0.2, 0.3, 0.5):
        for eps in (0.001, 0.01, 0.05, 0.1, 0.2, 0.4):
            if tau + eps <= 1:
                worst = max(worst, abs(tightness_error(tau, eps)[1] - eps / tau))
    ok = abs(mean - 1.5) <= 1e-12 and abs(err - 0.5) <= 1e-12 and worst <= 1e-12
    verdict(report_line, 2, "clipping tightness", ok,
            f"tau=0.1 eps=0.05: mean {mean!r}, error {err!r}; grid max |err - eps/tau| = {worst:.2e}")


def sweep_instances(n=100):
    return [sw.random_instance(1000 + s, 1 + s % 3, 2 + s % 2, 1 + s % 4) for s in range(n)]


def matched_min(pi, h):
    return float(np.min(pi[np.arange(len(h)), h]))


def test_3_lemma_sandwich(report_line):
    failures, over, unequal, equal_checks = 0, 0, 0, 0
    for inst in sweep_instances():
        pi = sw.mixture_policy(inst.seq)
        failures += not sw.lemma1_bounds(inst.world, pi, inst.pi_hat, inst.tau, inst.h).ok
        v = sw.exact_policy_value(inst.world, inst.h)
        mean = sw.exact_estimator_expectation(inst.world, pi, inst.h, pi, inst.tau)
        over += mean > v + 1e-12
        m = matched_min(pi, inst.h)
        for tau in {inst.tau, m} if m > 0 else {inst.tau}:
            if tau <= m:
                equal_checks += 1
                mean = sw.exact_estimator_expectation(inst.world, pi, inst.h, pi, tau)
                unequal += abs(mean - v) > 1e-12
    ok = failures == 0 and over == 0 and unequal == 0 and equal_checks > 0
    verdict(report_line, 3, "bias sandwich", ok,
            f"100 instances: {failures} bound violations, {over} overestimates with exact "
            f"propensities, {unequal}/{equal_checks} unequal where tau <= min pi(h(x)|x)")


def test_4_regret_radius(report_line):
    checked, violations, slack = 0, 0, math.inf
    for inst in sweep_instances():
        pi = sw.mixture_policy(inst.seq)
        m = matched_min(pi, inst.h)
        if m <= 0:
            continue
        # restrict the sweep to pi(h(x)|x) >= tau by lowering tau where needed
        tau = min(inst.tau, m)
        mean = sw.exact_estimator_expectation(inst.world, pi, inst.h, inst.pi_hat, tau)
        gap = abs(mean - sw.exact_policy_value(inst.world, inst.h))
        radius = sw.corollary1_radius(inst.world, pi, inst.pi_hat, tau)
        violations += gap > radius + 1e-12
        slack = min(slack, radius - gap)
        checked += 1
    ok = violations == 0 and checked >= 50
    verdict(report_line, 4, "regret radius", ok,
            f"{checked} instances with pi(h(x)|x) >= tau, {violations} violations, "
            f"min slack {slack:.3g}")


def hoeffding_world():
    world = sw.SyntheticWorld(["x0", "x1"], [0.5, 0.5], ["a", "b"], [[0.5, 0.3], [0.6, 0.5]],
                              sw.BERNOULLI)
    seq = sw.PolicySequence([(np.array([[0.3, 0.7], [0.5, 0.5]]), 50),
                             (np.array([[0.6, 0.4], [0.2, 0.8]]), 50)])
    return world, seq


def test_5_hoeffding(report_line):
    trials, delta = 10_000, 0.05
    sigma = math.sqrt(delta * (1 - delta) / trials)
    world, seq = hoeffding_world()
    pi = sw.mixture_policy(seq)
    rates = {}
    for tau in (0.1, 1.0):
        rates[tau] = sw.hoeffding_check(world, seq, [0, 1], pi, tau, delta, trials, seed=5)
    ok = all(r <= delta + 3 * sigma for r in rates.values()) and seq.T == 100
    verdict(report_line, 5, "Hoeffding radius", ok,
            ", ".join(f"tau={t}: rate {r:.4f}" for t, r in rates.items())
            + f" (limit {delta + 3 * sigma:.4f})")


def test_6_interval_coverage(report_line):
    world, seq = hoeffding_world()
    seq = sw.cycle_sequence(seq, 400)
    pi = sw.mixture_policy(seq)
    cover = sw.interval_coverage(world, seq, [0, 1], pi, 0.2, 0.05, 1000, seed=6)
    worst = 0.0
    for T in (1, 10, 100, 1000):
        for delta in (0.01, 0.05, 0.2):
            for tau in (0.05, 1.0):
                hi = confidence_interval(0.0, T, tau, delta)[1]
                worst = max(worst, abs(hi * tau - (1 - (delta / 2) ** (1 / T))))
    ok = cover >= 0.94 and worst <= 1e-9
    verdict(report_line, 6, "interval coverage", ok,
            f"coverage {cover:.3f} over 1000 runs (>= 0.94); zero case max |diff| = {worst:.2e}")


def shipped_table(seed):
    world, seq = sw.load_shipped()
    data = sw.log_events(world, seq, seed)
    table = propensity.fit_empirical(data)
    catalog = dict(world.action_features)
    values = {}
    for tau in (0.05, 0.01):
        pol = learner.train_learned(data, table, TrainConfig(tau=tau), catalog=catalog)
        values[("Learned", tau)] = sw.exact_estimator_expectation(world, seq, pol, table, tau)
        values[("Random", tau)] = sw.exact_random_expectation(world, seq, table, tau)
    naive = learner.train_naive(data, TrainConfig(weighted=False), catalog=catalog)
    for tau in (0.05, 0.01):
        values[("Naive", tau)] = sw.exact_estimator_expectation(world, seq, naive, table, tau)
    return world, seq, values


def test_7_warm_start_table(report_line):
    start = time.perf_counter()
    world, seq = sw.load_shipped()
    counts = [n for _, n in seq.blocks[:3]]
    ok, rows = counts[0] >= 100 * counts[2], []
    for seed in (0, 1, 2):
        _, _, v = shipped_table(seed)
        for tau in (0.05, 0.01):
            ok &= v[("Learned", tau)] > v[("Random", tau)] > v[("Naive", tau)]
        ok &= v[("Learned", 0.01)] >= v[("Learned", 0.05)]
        rows.append(f"seed {seed}: L {v[('Learned', 0.05)]:.4f}/{v[('Learned', 0.01)]:.4f} "
                    f"R {v[('Random', 0.05)]:.4f}/{v[('Random', 0.01)]:.4f} "
                    f"N {v[('Naive', 0.05)]:.4f}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 60
    verdict(report_line, 7, "warm-start table", ok,
            f"tau 0.05/0.01 -> {'; '.join(rows)}; {elapsed:.1f}s (< 60s)")


def random_event(rng):
    def vec(n):
        ids = sorted(rng.choice(10_000, size=n, replace=False).tolist())
        return SparseVector(tuple(ids), tuple(rng.uniform(-1, 1, size=n).tolist()))
    f = cross_features(vec(int(rng.integers(1, 4))), vec(int(rng.integers(1, 4))))
    model = LinearModel({i: float(rng.normal()) for i in f.ids}, float(rng.normal()))
    return model, f, float(rng.random()), float(rng.uniform(1, 20))


def test_8_gradient_check(report_line):
    rng = np.random.default_rng(8)
    h, worst, checked = 1e-5, 0.0, 0
    for _ in range(100):
        model, f, y, w = random_event(rng)
        grad = learner.event_gradient(model, f, y, w)
        for i in f.ids:
            base = model.weights[i]
            model.weights[i] = base + h
            up = learner.event_loss(model, f, y, w)
            model.weights[i] = base - h
            down = learner.event_loss(model, f, y, w)
            model.weights[i] = base
            numeric = (up - down) / (2 * h)
            worst = max(worst, abs(grad[i] - numeric) / max(abs(grad[i]), abs(numeric), 1e-12))
            checked += 1
        # the SGD step is exactly -lr times the analytic gradient
        before = dict(model.weights)
        learner.sgd_step(model, f, y, w, 0.01)
        for i in f.ids:
            assert model.weights[i] - before[i] == pytest.approx(-0.01 * grad[i], rel=1e-9, abs=1e-15)
    ok = worst <= 1e-4
    verdict(report_line, 8, "gradient check", ok,
            f"100 events, {checked} weights, max relative error {worst:.2e} (tol 1e-4)")


def run_pipeline(root):
    world_path, seq_path = (str(p) for p in sw.shipped_paths())
    events, table, model = root / "events.tsv", root / "table.tsv", root / "model.txt"
    report = root / "report.tsv"
    steps = [
        ["simulate", "--world", world_path, "--sequence", seq_path, "--seed", "9",
         "--rounds", "3990", "--split-at", "2793", "--out", str(events)],
        ["fit", str(events), "--scope", "all", "--out", str(table)],
        ["train", str(events), "--table", str(table), "--tau", "0.05", "--seed", "9",
         "--out", str(model)],
        ["evaluate", str(events), "--table", str(table), "--tau", "0.05", "--policy", "random",
         "--policy", f"model:{model}", "--out", str(report)],
    ]
    codes = [cli.main(s) for s in steps]
    return codes, {p.name: p.read_bytes() for p in (events, table, model, report)}


def test_9_determinism(report_line, tmp_path, capsys):
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    codes_a, a = run_pipeline(tmp_path / "a")
    codes_b, b = run_pipeline(tmp_path / "b")
    capsys.readouterr()
    same = [name for name in a if a[name] == b[name]]
    ok = codes_a == codes_b == [0, 0, 0, 0] and len(same) == len(a)
    verdict(report_line, 9, "determinism", ok,
            f"exit codes {codes_a}/{codes_b}; byte-identical: {', '.join(sorted(same))}")
