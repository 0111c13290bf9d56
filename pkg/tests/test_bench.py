import numpy as np
import pytest

from loosemesh.bench import (BenchReport, BenchRow, AIRFOIL_RATIO, fit_exponent, output_difference,
                             run_bench, strategy_comparison)
from loosemesh.generators import GENERATORS, generate


def test_fit_exponent_recovers_power_law():
    x = np.array([1e2, 1e3, 1e4, 1e5])
    assert fit_exponent(x, 3e-6 * x ** 1.5) == pytest.approx(1.5)
    assert fit_exponent(x, 2e-4 * x * np.log(x)) < 1.2


@pytest.mark.parametrize("name", GENERATORS)
def test_generators_in_unit_square_and_unique(name):
    a = generate(name, 200, 3)
    assert a.min() >= 0 and a.max() <= 1
    assert len(np.unique(a, axis=0)) == len(a)


def test_grid_seed_independent():
    assert np.array_equal(generate("grid", 16, 0), generate("grid", 16, 9))
    rep = run_bench("grid", [16], [0, 1], ["baseline-offcenter"], readback=False)
    assert rep.rows[0].steiner_count == rep.rows[1].steiner_count


def test_report_aggregates():
    rep = run_bench("uniform", [20, 60], [0], ["fast", "baseline-offcenter", "baseline-circumcenter"])
    agg = rep.aggregates()
    assert agg["rows"] == 6 and agg["rows_failing_audit"] == 0
    assert agg["airfoil_reference_ratio"] == AIRFOIL_RATIO
    assert all(r.readback_ok for r in rep.rows)
    assert "fast_baseline_steiner_ratio=" in rep.to_text()


def test_ratio_ignores_failed_rows():
    rows = [BenchRow("u", 10, 0, "a", 1.4, 10, 1, 1, 0.1, True),
            BenchRow("u", 10, 0, "b", 1.4, 20, 1, 1, 0.1, True),
            BenchRow("u", 10, 1, "a", 1.4, 99, 1, 1, 0.1, False),
            BenchRow("u", 10, 1, "b", 1.4, 1, 1, 1, 0.1, True)]
    assert BenchReport(rows).steiner_ratio("a", "b") == pytest.approx(0.5)


def test_strategy_comparison_small():
    off, cc, ratio, rows = strategy_comparison(instances=4, n=15)
    assert len(rows) == 4 and ratio == pytest.approx(off / cc)
    assert off < cc


def test_output_difference_is_reported():
    d = output_difference(generate("uniform", 40, 0))
    assert d["shared"] > 0 and isinstance(d["identical"], bool)
