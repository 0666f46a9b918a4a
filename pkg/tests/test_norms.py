import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_solenoidal
from specdecay.norms import (
    NormKind,
    ball_mass,
    ball_volume_weight,
    hs_norm_sq,
    l1_norm,
    l2_norm_sq,
    low_freq_sup,
    mode_magnitude,
    radial_weight_sum,
    x_norm,
    y_norm,
)
from specdecay.spectral import VectorField, make_grid


def brute(v, weight, reducer, select=lambda xi: True):
    """Loop over every mode explicitly."""
    g = v.grid
    vals = []
    for idx in np.ndindex(*g.shape):
        m = [int(g.mode_index[i]) for i in idx]
        xi = g.delta_xi * np.array(m, dtype=float)
        r = float(np.sqrt(xi @ xi))
        if not select(r):
            continue
        amp = float(np.sqrt(np.sum(np.abs(v.coeffs[(slice(None),) + idx]) ** 2)))
        vals.append(weight(r, amp))
    return reducer(vals) if vals else 0.0


@pytest.fixture
def field():
    return random_solenoidal(make_grid(8, 4 * math.pi), seed=21, sigma=0.3)


class TestAgainstModeLoops:
    def test_l2_matches_physical_integral(self, field):
        phys = field.to_physical()
        g = field.grid
        assert l2_norm_sq(field) == pytest.approx(g.dx**3 * np.sum(phys**2), rel=1e-12)

    @pytest.mark.parametrize("s", [-1.0, -0.5, 1.0, 2.0])
    def test_hs(self, field, s):
        P = field.grid.plancherel
        oracle = brute(field, lambda r, a: P * r ** (2 * s) * a * a, sum, lambda r: r > 0)
        assert hs_norm_sq(field, s) == pytest.approx(oracle, rel=1e-12)

    @pytest.mark.parametrize("s", [-1.0, 0.0, 0.7, 1.0])
    def test_x_norm(self, field, s):
        w = field.grid.cell_volume
        oracle = brute(field, lambda r, a: w * r**s * a, sum, lambda r: r > 0)
        assert x_norm(field, s) == pytest.approx(oracle, rel=1e-12)

    @pytest.mark.parametrize("s", [-1.0, 0.0, 1.0])
    def test_y_norm(self, field, s):
        oracle = brute(field, lambda r, a: r**s * a, max, lambda r: r > 0)
        assert y_norm(field, s) == pytest.approx(oracle, rel=1e-14)

    def test_low_freq_sup(self, field):
        R = 3.5 * field.grid.delta_xi
        oracle = brute(field, lambda r, a: r**0.5 * a, max, lambda r: 0 < r <= R)
        assert low_freq_sup(field, 0.5, R) == pytest.approx(oracle, rel=1e-14)

    def test_low_freq_sup_empty_ball(self, field):
        assert low_freq_sup(field, 0.0, 0.1 * field.grid.delta_xi) == 0.0

    def test_ball_mass(self, field):
        R = 2.2 * field.grid.delta_xi
        P = field.grid.plancherel
        oracle = brute(field, lambda r, a: P * a * a, sum, lambda r: r <= R)
        assert ball_mass(field, R) == pytest.approx(oracle, rel=1e-12)

    def test_ball_mass_exhausts_l2(self, field):
        assert ball_mass(field, 10.0) == pytest.approx(l2_norm_sq(field), rel=1e-13)

    def test_l1_norm(self, field):
        phys = field.to_physical()
        oracle = field.grid.dx**3 * np.sum(np.sqrt(np.sum(phys**2, axis=0)))
        assert l1_norm(field) == pytest.approx(oracle, rel=1e-12)

    def test_mode_magnitude(self, field):
        assert np.allclose(mode_magnitude(field) ** 2, np.sum(np.abs(field.coeffs) ** 2, axis=0))


class TestProperties:
    @given(st.integers(0, 2**31), st.floats(-1, 1), st.floats(0.1, 5))
    def test_linearity(self, seed, s, c):
        v = random_solenoidal(make_grid(8, 2 * math.pi), seed=seed)
        assert x_norm(v * c, s) == pytest.approx(c * x_norm(v, s), rel=1e-12)
        assert y_norm(v * c, s) == pytest.approx(c * y_norm(v, s), rel=1e-12)
        assert l2_norm_sq(v * c) == pytest.approx(c * c * l2_norm_sq(v), rel=1e-12)

    @given(st.integers(0, 2**31), st.floats(-0.99, 0.99))
    def test_x_interpolation(self, seed, s):
        v = random_solenoidal(make_grid(8, 2 * math.pi), seed=seed, sigma=0.5)
        rhs = x_norm(v, -1) ** ((1 + s) / 2) * x_norm(v, 1) ** ((1 - s) / 2)
        assert x_norm(v, -s) <= rhs * (1 + 1e-12)

    @given(st.integers(0, 2**31))
    def test_l2_below_x_times_y(self, seed):
        # sum |v|^2 <= max|v| * sum |v|, each with its lattice weight
        v = random_solenoidal(make_grid(8, 2 * math.pi), seed=seed)
        g = v.grid
        bound = g.plancherel / g.cell_volume * y_norm(v, 0) * x_norm(v, 0)
        assert l2_norm_sq(v) <= bound * (1 + 1e-12)

    def test_zero_field(self):
        v = VectorField.zeros(make_grid(8, 1.0))
        for f in (l2_norm_sq, lambda u: x_norm(u, -1), lambda u: y_norm(u, 0), l1_norm):
            assert f(v) == 0.0


class TestRadialWeights:
    def test_lattice_sum_approaches_continuum(self):
        g = make_grid(64, 64 * math.pi)
        R = 0.6
        assert radial_weight_sum(g, 0.0, R) == pytest.approx(ball_volume_weight(0.0, R), rel=1e-2)

    def test_empty_ball(self):
        g = make_grid(8, 1.0)
        assert radial_weight_sum(g, -1.0, 0.1 * g.delta_xi) == 0.0


class TestNormKind:
    @pytest.mark.parametrize("label", ["L2Sq", "HsSq(1)", "HnegSq(0.5)", "Xsigma(-1)", "Ysigma(0)",
                                       "LowFreqSup(0,1)", "BallMass(0.25)", "L1", "Ysigma(-0.5)"])
    def test_label_round_trip(self, label):
        assert NormKind.parse(label).label == label

    def test_whitespace_and_floats(self):
        k = NormKind.parse(" LowFreqSup( 0.5 , 1.0 ) ")
        assert k == NormKind("LowFreqSup", (0.5, 1.0))
        assert k.label == "LowFreqSup(0.5,1)"

    @pytest.mark.parametrize("bad", ["Foo", "Xsigma", "Xsigma(4)", "HnegSq(0)", "BallMass(-1)",
                                     "L2Sq(1)", "Ysigma(a)", "LowFreqSup(0)", "Xsigma(1"])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            NormKind.parse(bad)

    def test_callable_dispatch(self, field):
        assert NormKind.parse("Xsigma(-1)")(field) == x_norm(field, -1.0)
        assert NormKind.parse("HnegSq(0.5)")(field) == hs_norm_sq(field, -0.5)
        assert NormKind.parse("BallMass(0.3)")(field) == ball_mass(field, 0.3)
