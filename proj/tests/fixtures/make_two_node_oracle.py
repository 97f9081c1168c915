"""Reference trajectory for the two-node homogeneous mixing problem.

Speeds 0.5 and 1.0 (1D, collinear so the angle factor is 1), weights 0.5,
D = 1, kappa = 1, rho(0) = (1, 0.6). Integrated with scipy's DOP853 at tight
tolerances, independent of the C++ code.
"""
import json
import sys

from scipy.integrate import solve_ivp


def r(d):
    return -d / (1.0 + d) if d >= 0.0 else -d / (1.0 - d)


def m(ra, rb, a, b, D=1.0):
    d = abs(b) * rb - abs(a) * ra
    return (ra if d >= 0.0 else rb) * r(D * d)


def rhs(_t, y):
    a, b = 0.5, 1.0
    w = 0.5
    m12 = m(y[0], y[1], a, b)
    return [w * m12, -w * m12]


times = [0.0, 0.25, 0.5, 1.0, 2.0]
sol = solve_ivp(rhs, (0.0, times[-1]), [1.0, 0.6], method="DOP853", rtol=1e-13, atol=1e-15,
                t_eval=times)
doc = {
    "speeds": [0.5, 1.0],
    "weights": [0.5, 0.5],
    "D": 1.0,
    "kappa": 1.0,
    "initial": [1.0, 0.6],
    "initial_rate": rhs(0.0, [1.0, 0.6]),
    "samples": [{"t": t, "rho": [sol.y[0][k], sol.y[1][k]]} for k, t in enumerate(times)],
}
json.dump(doc, sys.stdout, indent=2)
sys.stdout.write("\n")
