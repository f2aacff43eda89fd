import math

import pytest

import ballistic_fi as bfi


def test_registry_and_evaluation():
    assert "sine_squared" in bfi.registered_potentials()
    p = bfi.potential("sine_squared", {"c": 1})
    assert p.dim == 1
    assert p([1.0]) == pytest.approx(1.0 + math.sin(1.0) ** 2)


def test_gaussian_constants():
    g = bfi.gibbs(bfi.potential("quadratic", {"alpha": 2}), 0.1, 200)
    assert abs(sum(g.weights) - 1.0) < 1e-12
    assert bfi.poincare_spectral(g)["value"] == pytest.approx(0.05, rel=1e-6)
    lo = bfi.ls_lower_bound(g)
    assert lo["value"] == pytest.approx(0.05, rel=1e-2)
    assert bfi.ls_upper_bound(g)["value"] == pytest.approx(0.05, rel=1e-6)
    assert abs(bfi.laplace_gap(g)) < 1e-8


def test_sine_pl_and_poincare():
    p = bfi.potential("sine_squared", {"c": 1})
    assert bfi.pl_constant_static(p)["value"] == pytest.approx(0.930902155621, rel=1e-9)
    g = bfi.gibbs(p, 0.01, 400)
    ratio = bfi.poincare_spectral(g)["value"] / 0.01
    assert 0.2425 <= ratio <= 0.2575
    lower, upper = bfi.muckenhoupt_bracket(g)
    assert lower <= ratio * 0.01 <= upper


def test_lyapunov_arithmetic():
    assert bfi.lyapunov_bound(1.0, 1.0, 0.0, 0.5, 1.0, 1.0, 0.25) == pytest.approx(7.0 / 6.0)


def test_sweep_and_errors():
    out = bfi.run_sweep("potential = quadratic\ntemperatures = 1, 0.5\ngrid.resolution = 100\nlsi.iters = 20\n")
    assert len(out["rows"]) == 2
    assert all(r["ok"] for r in out["rows"])
    assert out["csv"].startswith("t,")
    with pytest.raises(bfi.PreconditionError, match="PL constant divergent"):
        bfi.run_sweep("potential = double_well\ntemperatures = 0.1\n")
    with pytest.raises(ValueError):
        bfi.potential("nope")


def test_langevin_reproducible():
    p = bfi.potential("quadratic", {"alpha": 1})
    a = bfi.langevin(p, 0.5, particles=100, burn_in=0.1, seed=3)
    b = bfi.langevin(p, 0.5, particles=100, burn_in=0.1, seed=3)
    assert a == b and len(a) == 100
