import numpy as np
import pytest

from summation import CompensatedAccumulator, compensated_sum, fsum, two_sum


def test_two_sum_recovers_rounding_error():
    s, t = two_sum(1e16, 1.0)
    assert s == 1e16
    assert t == 1.0


def test_two_sum_is_elementwise():
    s, t = two_sum(np.array([1e16, 0.5]), np.array([1.0, 0.25]))
    np.testing.assert_array_equal(s, [1e16, 0.75])
    np.testing.assert_array_equal(t, [1.0, 0.0])


def test_accumulator_keeps_small_terms():
    acc = CompensatedAccumulator(())
    for value in (1e16, 1.0, -1e16):
        acc.add(value)
    assert acc.total == 1.0
    assert (1e16 + 1.0) - 1e16 == 0.0


def test_accumulator_is_vectorised():
    acc = CompensatedAccumulator((2,))
    acc.add(np.array([1e16, 3.0]))
    acc.add(np.array([1.0, 4.0]))
    acc.add(np.array([-1e16, -7.0]))
    np.testing.assert_array_equal(acc.total, [1.0, 0.0])


def test_fsum_is_exactly_rounded():
    assert fsum([0.1] * 10) == 1.0
    assert fsum(np.array([[1e100, 1.0], [-1e100, 1.0]])) == 2.0


def test_compensated_sum_along_axis():
    values = np.array([[1e16, 1.0, -1e16], [0.1, 0.2, 0.3]])
    totals = compensated_sum(values, axis=-1)
    assert totals[0] == 1.0
    assert totals[1] == pytest.approx(0.6, abs=1e-15)
    np.testing.assert_allclose(compensated_sum(values.T, axis=0), totals)
    assert compensated_sum(np.array([1e16, 1.0, -1e16])) == 1.0
