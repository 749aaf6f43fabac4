"""Manufactured-solution order verification.

The closed-form sources in kppfront.manufactured are re-derived
symbolically here before the ladders run, so the order measurements rest
on independently checked right-hand sides.
"""

import math

import numpy as np
import pytest
import sympy as sp

from kppfront import manufactured as mms


@pytest.fixture(scope="module")
def symbolic_sources():
    t, y, c, mu = sp.symbols("t y c mu", real=True)
    H = mms.H0 + mms.HA * sp.sin(mms.HW * t)
    A = mms.A0 + mms.AA * sp.sin(mms.AW * t)
    v = A * sp.sin(sp.pi * y)
    Sv = (
        sp.diff(v, t)
        - sp.diff(v, y, 2) / H**2
        - (c + y * sp.diff(H, t)) * sp.diff(v, y) / H
        - v * (1 - v)
    )
    vy1 = sp.diff(v, y).subs(y, 1)
    SH = sp.diff(H, t) - (-mu * vy1 / H - c)
    fv = sp.lambdify((t, y, c, mu), sp.simplify(Sv), "numpy")
    fH = sp.lambdify((t, c, mu), sp.simplify(SH), "numpy")
    return fv, fH


def test_hand_coded_sources_match_symbolic(symbolic_sources):
    fv, fH = symbolic_sources
    rng = np.random.default_rng(20260809)
    for _ in range(40):
        t = float(rng.uniform(0.0, 10.0))
        c = float(rng.uniform(0.05, 1.5))
        mu = float(rng.uniform(0.2, 8.0))
        yy = rng.uniform(0.0, 1.0, size=7)
        assert np.allclose(mms.source_v(t, yy, c, mu), fv(t, yy, c, mu), atol=1e-11)
        assert mms.source_H(t, c, mu) == pytest.approx(float(fH(t, c, mu)), abs=1e-11)


def test_exact_fields_satisfy_augmented_system_initially():
    y = np.linspace(0.0, 1.0, 65)
    v0 = mms.v_exact(0.0, y)
    assert v0[0] == 0.0 and abs(v0[-1]) < 1e-15
    assert mms.H_exact(0.0) == 2.0


def test_spatial_order_two():
    # dt scaled with dy^2 so the O(dt) term tracks the O(dy^2) one
    errs = []
    for k, N in enumerate((32, 64, 128)):
        errs.append(mms.run(0.5, 1.0, N, 0.02 / 4**k, T=1.0))
    for idx in (0, 1):  # H error and profile error
        o1 = math.log2(errs[0][idx] / errs[1][idx])
        o2 = math.log2(errs[1][idx] / errs[2][idx])
        assert o1 == pytest.approx(2.0, abs=0.3)
        assert o2 == pytest.approx(2.0, abs=0.3)


def test_temporal_order_one():
    errs = []
    for dt in (0.02, 0.01, 0.005):
        errs.append(mms.run(0.5, 1.0, 512, dt, T=1.0))
    for idx in (0, 1):
        o1 = math.log2(errs[0][idx] / errs[1][idx])
        o2 = math.log2(errs[1][idx] / errs[2][idx])
        assert o1 == pytest.approx(1.0, abs=0.2)
        assert o2 == pytest.approx(1.0, abs=0.2)
