import math

import pytest

from levy_groups.quadrature import QuadratureError, simpson_adaptive


def test_smooth_integrals():
    assert simpson_adaptive(math.sin, 0.0, math.pi, tol=1e-12) == pytest.approx(2.0, abs=1e-11)
    assert simpson_adaptive(lambda x: x ** 3, 0.0, 2.0, tol=1e-12) == pytest.approx(4.0, abs=1e-11)
    assert simpson_adaptive(lambda x: 1.0, -1.0, 3.0) == pytest.approx(4.0, abs=1e-12)


def test_empty_interval():
    assert simpson_adaptive(math.exp, 1.0, 1.0) == 0.0


def test_oscillatory_integrand_to_tight_tolerance():
    # int_0^pi sin(50 t) dt = (1 - cos(50 pi))/50 = 0
    val = simpson_adaptive(lambda t: math.sin(50.0 * t), 0.0, math.pi, tol=1e-11)
    assert abs(val) < 1e-10
    val = simpson_adaptive(lambda t: math.cos(37.0 * t) ** 2, 0.0, math.pi, tol=1e-11)
    assert val == pytest.approx(math.pi / 2.0, abs=1e-10)


def test_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        simpson_adaptive(math.sin, 0.0, 1.0, tol=0.0)


def test_raises_when_subdivision_cap_hit():
    jump = 1.0 / 3.0

    def step(x):
        return 0.0 if x < jump else 1.0

    with pytest.raises(QuadratureError):
        simpson_adaptive(step, 0.0, 1.0, tol=1e-13)
