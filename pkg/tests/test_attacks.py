import csv
import io
import math

import pytest
from scipy import stats

from edgeaudit.attacks import (
    CSV_COLUMNS,
    AttackResult,
    accuracy_vs_n_sweep,
    queens_attack_experiment,
    queens_attack_trial,
    sweep_to_csv,
)
from edgeaudit.distributions import TwoQueensModel
from edgeaudit.errors import InputError


def exact_accuracy(n, a, b, q, eps):
    """Accuracy of the threshold rule by summing over the binomial edge count."""
    m = math.comb(n, 2)
    cut = (a + b) / 2 * m
    noise = stats.laplace(scale=1 / eps)
    acc = 0.0
    for k in range(m):
        # linked: count = 1 + Bin(m-1, a); guess right when count + noise > cut
        acc += q * stats.binom.pmf(k, m - 1, a) * noise.sf(cut - (k + 1))
        acc += (1 - q) * stats.binom.pmf(k, m - 1, b) * noise.cdf(cut - k)
    return acc


def test_noise_free_extremes_are_perfect():
    res = queens_attack_experiment(TwoQueensModel(50, 1.0, 0.0, 0.5), 10.0, 1000, 7)
    assert res.accuracy * 1000 >= 999


def test_small_n_is_imperfect_and_matches_exact():
    n, a, b, q, eps = 3, 0.8, 0.2, 0.5, 1.0
    trials = 20_000
    res = queens_attack_experiment(TwoQueensModel(n, a, b, q), eps, trials, 99)
    exact = exact_accuracy(n, a, b, q, eps)
    assert exact < 1
    assert res.accuracy < 1
    assert abs(res.accuracy - exact) <= 4 * math.sqrt(exact * (1 - exact) / trials)


def test_conditional_mean_density():
    n, a, b, eps = 8, 0.7, 0.2, 1.0
    m = math.comb(n, 2)
    res = queens_attack_experiment(TwoQueensModel(n, a, b, 0.5), eps, 20_000, 5)
    for mean, r, count in ((res.mean_density_truth1, a, res.trials_truth1),
                           (res.mean_density_truth0, b, res.trials_truth0)):
        expected = ((1 if r == a else 0) + (m - 1) * r) / m
        sd = math.sqrt((m - 1) * r * (1 - r) + 2 / eps**2) / m
        assert abs(mean - expected) <= 3 * sd / math.sqrt(count)


def test_single_trial_reports_missing_class_as_none():
    res = queens_attack_experiment(TwoQueensModel(5, 0.8, 0.2, 0.5), 1.0, 1, 3)
    assert res.trials == 1 and res.accuracy in (0.0, 1.0)
    out = res.to_json()
    assert (out["mean_density_truth1"] is None) != (out["mean_density_truth0"] is None)


def test_threads_do_not_change_results():
    model = TwoQueensModel(20, 0.8, 0.2, 0.5)
    assert queens_attack_experiment(model, 1.0, 300, 17) == \
        queens_attack_experiment(model, 1.0, 300, 17, threads=4)


def test_trial_is_reproducible():
    model = TwoQueensModel(10, 0.8, 0.2, 0.5)
    assert queens_attack_trial(model, 1.0, 4) == queens_attack_trial(model, 1.0, 4)


def test_sweep_csv_shape():
    rows = accuracy_vs_n_sweep(0.8, 0.2, 0.5, 1.0, [10, 20, 30], 50, 123)
    table = list(csv.reader(io.StringIO(sweep_to_csv(rows))))
    assert tuple(table[0]) == CSV_COLUMNS
    assert len(table) == 4
    assert [int(r[0]) for r in table[1:]] == [10, 20, 30]
    assert {r[5] for r in table[1:]} == {"1.0"}
    assert {r[6] for r in table[1:]} == {"123"}


def test_validation():
    with pytest.raises(InputError):
        queens_attack_experiment(TwoQueensModel(5, 0.8, 0.2), 1.0, 0, 1)
    with pytest.raises(InputError):
        AttackResult(5, 0.8, 0.2, 0.5, 1.0, 1, 10, 1.5, 5, 5, 0.5, 0.5)
