"""Frozen expected values, computed by the independent oracles.

Semi-wave slopes and invasion speeds come from tests/oracle_shooting.py
(fixed-step RK4 with bisected event location and launch-offset
extrapolation, step 5e-4, offset 1e-7), cross-checked against a DOP853
run and, at c = 0, against the conserved energy p^2/2 + q^2/2 - q^3/3 of
the undamped system (value 1/6 on the connecting orbit, so |p| at q = 0
is 1/sqrt(3)).  Stored digits are stable to ~1e-12 under step and offset
refinement.
"""

# |q'(0)| of the orbit leaving (1, 0), by erosion speed c
SEMI_WAVE_SLOPE = {
    0.0: 0.5773502691896348,  # analytic: 3**-0.5
    0.5: 0.29623473052574784,
    1.0: 0.10491513853133527,
    1.5: 0.013573484942694074,
}

# invasion speed c*(mu): root of mu * s(c) = c (oracle bisection, tol 1e-12)
C_STAR = {
    0.5: 0.22147125524195524,
    1.0: 0.36437072331547815,
    2.0: 0.5476852307738038,
    4.0: 0.7513165963878237,
    8.0: 0.9519333407423476,
    100.0: 1.4857329267796615,
}

# compact-wave support lengths (oracle shooting, residual tol 1e-12)
L_C = {
    (0.05, 1.0): 3.2158390722225496,
    (0.5 * C_STAR[1.0], 1.0): 3.5266696920207363,
}

# midpoint values w(0) of the bounded profile on (-l, l)
ELLIPTIC_MID = {
    (0.0, 10.0): 0.999854014391025,
    (0.5, 5.0): 0.9547013670616334,
    (0.5, 10.0): 0.9991151540747096,
    (0.5, 20.0): 0.9999996418653555,
}
