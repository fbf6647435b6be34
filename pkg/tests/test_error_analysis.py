import math

import numpy as np
import pytest

from error_analysis import (
    ErrorTriple,
    Table1Row,
    TurningPoint,
    TurningPointError,
    error_triple,
    balance_turning_point,
    centre_band,
    golden_turning_point,
    locate_turning_point,
    log_grid,
    sweep_over_r,
    table1_report,
)

# (R0_1, Delta1/dE, R0_2, Delta2, R0_3, Delta3) for dE = 1e-4
TABLE1 = {
    2000: (57.2, 4.6e-5, 72.2, 8.0e-7, 56.0, 1.2e-4),
    4000: (86.2, 2.2e-5, 103.2, 2.8e-7, 81.0, 6.1e-5),
    8000: (130.3, 1.1e-5, 147.0, 9.9e-8, 126.0, 2.9e-5),
}


def _triple(**overrides):
    values = dict(
        n=100, r=10.0, de=1e-3, delta1=2e-6, delta2=3e-7, delta3=4e-5, k1=50, k2=51, k3=1,
        delta3_centre=1e-5, delta3_outer=4e-5,
    )
    values.update(overrides)
    return ErrorTriple(**values)


def test_error_triple_accessors():
    t = _triple()
    assert [t.delta(i) for i in (1, 2, 3)] == [2e-6, 3e-7, 4e-5]
    assert [t.argmax(i) for i in (1, 2, 3)] == [50, 51, 1]
    assert t.reported(1) == pytest.approx(2e-3)
    assert t.reported(2) == 3e-7
    with pytest.raises(ValueError):
        t.delta(4)


def test_table1_row_reports_delta1_in_units_of_de():
    points = (TurningPoint(57.0, 4.6e-9), TurningPoint(72.0, 8e-7), TurningPoint(56.0, 1.2e-4))
    row = Table1Row(n=2000, points=points, de=1e-4).as_row()
    assert row[0] == 2000
    assert row[1:3] == [57.0, pytest.approx(4.6e-5)]
    assert row[3:] == [72.0, 8e-7, 56.0, 1.2e-4]


def test_log_grid():
    grid = log_grid(10, 1000, 3)
    np.testing.assert_allclose(grid, [10, 100, 1000])
    for args in ((0, 10, 5), (10, 5, 5), (1, 10, 1)):
        with pytest.raises(ValueError):
            log_grid(*args)


def test_golden_search_on_toy_curve():
    tp = golden_turning_point(lambda r: 1.0 + math.log(r / 50.0) ** 2, 10.0, 200.0)
    assert tp.r0 == pytest.approx(50.0, rel=1e-2)
    assert tp.delta_min == pytest.approx(1.0, abs=1e-4)


def test_golden_search_needs_interior_minimum():
    with pytest.raises(TurningPointError):
        golden_turning_point(lambda r: 1.0 / r, 10.0, 200.0)
    with pytest.raises(TurningPointError):
        golden_turning_point(lambda r: r, 10.0, 200.0)


def test_golden_search_tolerates_flat_minimum():
    tp = golden_turning_point(lambda r: max(abs(math.log(r / 50.0)), 0.3), 10.0, 200.0)
    assert tp.delta_min == pytest.approx(0.3)
    assert 50.0 * math.exp(-0.3) <= tp.r0 <= 50.0 * math.exp(0.3)


def test_balance_point_on_toy_curves():
    tp = balance_turning_point(lambda r: (1.0 / r, 0.02), 10.0, 200.0)
    assert tp.r0 == pytest.approx(50.0, rel=1e-2)
    assert tp.delta_min == pytest.approx(0.02, rel=1e-2)
    with pytest.raises(TurningPointError):
        balance_turning_point(lambda r: (1.0 / r, 1e-6), 10.0, 200.0)
    with pytest.raises(TurningPointError):
        balance_turning_point(lambda r: (1.0 / r, 1.0), 10.0, 200.0)


def test_balance_point_of_a_flattening_curve():
    def split(r):
        return 5.0 / r, 0.1 * (1.0 - 1e-3 * r)

    with pytest.raises(TurningPointError):
        golden_turning_point(lambda r: max(split(r)), 10.0, 200.0)
    tp = balance_turning_point(split, 10.0, 200.0)
    assert tp.r0 == pytest.approx(52.8, rel=1e-2)
    centre, outer = split(tp.r0)
    assert centre == pytest.approx(outer, rel=1e-2)


def test_centre_band():
    assert centre_band(2000) == slice(998, 1002)
    assert centre_band(4) == slice(0, 4)


def test_error_triple_is_cached(clean_cache):
    first = error_triple(100, 5.0, 1e-3)
    assert error_triple(100, 5.0, 1e-3) is first
    assert first.n == 100 and first.r == 5.0
    assert 1 <= first.k1 <= 100


def test_errors_scale_with_de():
    small = error_triple.uncached(400, 10.0, 1e-4)
    large = error_triple.uncached(400, 10.0, 1e-3)
    assert large.delta1 == pytest.approx(10 * small.delta1, rel=1e-6)
    assert large.delta2 == pytest.approx(small.delta2, rel=1e-6)
    assert large.delta3 == pytest.approx(small.delta3, rel=1e-6)


def test_weights_at_exact_energies_change_delta2_only():
    final = error_triple.uncached(400, 10.0, 1e-4)
    exact = error_triple.uncached(400, 10.0, 1e-4, energy_source="exact")
    assert exact.delta1 == final.delta1
    assert exact.delta3 == final.delta3
    assert exact.delta2 != final.delta2


def test_sweep_keeps_grid_order_across_workers(clean_cache):
    grid = log_grid(2.0, 40.0, 5)
    serial = sweep_over_r(200, grid, 1e-3, workers=1)
    clean_cache.clear()
    threaded = sweep_over_r(200, grid, 1e-3, workers=3)
    assert [t.r for t in serial.triples] == list(grid)
    assert [t.r for t in threaded.triples] == list(grid)
    for a, b in zip(serial.triples, threaded.triples):
        assert a.delta1 == b.delta1 and a.delta2 == b.delta2 and a.delta3 == b.delta3
    for index, tp in zip((1, 2), serial.turning_points):
        curve = serial.curve(index)
        assert tp.delta_min == curve.min()
        assert tp.r0 == grid[int(np.argmin(curve))]
    assert serial.turning_points[2].r0 in grid


def test_sweep_rejects_bad_grids():
    for grid in ([], [5.0, 2.0], [-1.0, 2.0]):
        with pytest.raises(ValueError):
            sweep_over_r(100, grid, 1e-3)


def test_error_localisation_moves_to_band_edges():
    n = 2000
    below = error_triple.uncached(n, 20.0, 1e-4)
    above = error_triple.uncached(n, 150.0, 1e-4)
    for k in (below.k1, below.k2, below.k3):
        assert abs(k - n / 2) <= 3 * below.r
    for k in (above.k1, above.k2):
        assert min(k, n + 1 - k) <= 0.01 * n
    assert below.delta3_centre == below.delta3 > below.delta3_outer
    assert above.delta3_outer == above.delta3 > above.delta3_centre


def test_line_shape_error_plateaus_after_turning_point():
    n, r0 = 2000, 56.0
    sweep = sweep_over_r(n, log_grid(r0, 2 * r0, 4), 1e-4)
    curve = sweep.curve(3)
    assert curve.max() <= 1.5 * curve[0]
    assert all(t.delta3 >= t.delta2 for t in sweep.triples)


@pytest.mark.parametrize("index,r", [(1, 57.2), (2, 72.2), (3, 56.0)])
def test_errors_at_turning_points_for_n2000(index, r):
    expected = TABLE1[2000][2 * index - 1]
    triple = error_triple.uncached(2000, r, 1e-4)
    assert triple.reported(index) == pytest.approx(expected, rel=0.2)


@pytest.mark.slow
def test_locate_turning_point_n2000():
    tp = locate_turning_point(2000, 1e-4, 1, 20.0, 300.0)
    assert tp.r0 == pytest.approx(57.2, rel=0.05)
    assert tp.delta_min / 1e-4 == pytest.approx(4.6e-5, rel=0.2)


@pytest.mark.slow
def test_locate_line_shape_turning_point_n2000():
    tp = locate_turning_point(2000, 1e-4, 3, 20.0, 300.0)
    assert tp.r0 == pytest.approx(56.0, rel=0.1)
    assert tp.delta_min == pytest.approx(1.2e-4, rel=0.2)


@pytest.mark.slow
def test_delta1_saturates_in_n():
    a = error_triple.uncached(4000, 10.0, 1e-4)
    b = error_triple.uncached(8000, 10.0, 1e-4)
    assert a.delta1 == pytest.approx(b.delta1, rel=0.05)


@pytest.mark.slow
def test_table1_reproduction():
    rows = table1_report(de=1e-4)
    assert [row.n for row in rows] == [2000, 4000, 8000]
    for row in rows:
        values = row.as_row()[1:]
        expected = TABLE1[row.n]
        for i, rel in ((0, 0.05), (2, 0.05), (4, 0.1)):
            assert values[i] == pytest.approx(expected[i], rel=rel)
            assert values[i + 1] == pytest.approx(expected[i + 1], rel=0.2)
    for i in (1, 3, 5):
        r0 = [row.as_row()[i] for row in rows]
        assert r0[0] < r0[1] < r0[2]
