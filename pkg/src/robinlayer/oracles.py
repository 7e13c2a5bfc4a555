"""Independent reference values: radial shooting for the Robin disk.

On a disk of radius R the mode f(r) e^{i m theta} solves

    -f'' - f'/r + (m^2/r^2) f = E f,   f'(R) = alpha f(R).

The regular solution is started at r0 = 1e-6 from f ~ r^m (1 + c r^2) with
c = -E / (4 (m + 1)), integrated outward, and E is bisected on the sign of the
mismatch f'(R) - alpha f(R). Two integrators are available so one can be
checked against the other: adaptive RK4 with step doubling and a Taylor
series stepper using the exact recurrence of the equation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .errors import BracketError

log = logging.getLogger(__name__)

R0 = 1e-6


@dataclass(frozen=True)
class ShootingProblem:
    R: float = 1.0
    alpha: float = 1.0
    m: int = 0
    E_lo: float | None = None
    E_hi: float | None = None

    def __post_init__(self):
        if not (self.R > 0 and math.isfinite(self.R)):
            raise ValueError("R must be positive")
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError("alpha must be positive")
        if int(self.m) != self.m or self.m < 0:
            raise ValueError("m must be a non-negative integer")

    def bracket(self) -> tuple[float, float]:
        # E > -alpha^2 - 2 alpha/R - 1/R^2 is a safe lower bound for the attractive disk
        lo = self.E_lo if self.E_lo is not None else -(self.alpha + 1.0 / self.R) ** 2 - 1.0
        hi = self.E_hi if self.E_hi is not None else (self.m / self.R) ** 2 + 1.0
        return lo, hi


def _start(E, m):
    # f / r0^m and f' / r0^m from the two-term Frobenius series
    c = -E / (4.0 * (m + 1))
    f = 1.0 + c * R0 * R0
    df = m / R0 * (1.0 + c * R0 * R0) + 2.0 * c * R0
    return f, df


def _rhs(r, f, df, E, m2):
    return df, -df / r + (m2 / (r * r) - E) * f


def _rk4_step(r, f, df, h, E, m2):
    k1f, k1d = _rhs(r, f, df, E, m2)
    k2f, k2d = _rhs(r + 0.5 * h, f + 0.5 * h * k1f, df + 0.5 * h * k1d, E, m2)
    k3f, k3d = _rhs(r + 0.5 * h, f + 0.5 * h * k2f, df + 0.5 * h * k2d, E, m2)
    k4f, k4d = _rhs(r + h, f + h * k3f, df + h * k3d, E, m2)
    return (
        f + h / 6.0 * (k1f + 2 * k2f + 2 * k3f + k4f),
        df + h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d),
    )


def integrate_rk4(E: float, R: float, m: int, tol: float = 1e-12) -> tuple[float, float]:
    """(f(R), f'(R)) for the regular solution, adaptive RK4 with step doubling."""
    m2 = float(m * m)
    f, df = _start(E, m)
    r = R0
    h = 0.1 * R0
    while r < R:
        h = min(h, R - r)
        f1, d1 = _rk4_step(r, f, df, h, E, m2)
        fa, da = _rk4_step(r, f, df, 0.5 * h, E, m2)
        f2, d2 = _rk4_step(r + 0.5 * h, fa, da, 0.5 * h, E, m2)
        scale = max(abs(f2), abs(d2) * r, 1e-300)
        err = max(abs(f2 - f1), abs(d2 - d1) * r) / (15.0 * scale)
        if err <= tol or h < 1e-14 * R:
            r += h
            # local extrapolation
            f = f2 + (f2 - f1) / 15.0
            df = d2 + (d2 - d1) / 15.0
            # renormalize; only the ratio f'/f matters
            s = max(abs(f), abs(df) * r)
            f, df = f / s, df / s
            h *= min(4.0, 0.9 * (tol / max(err, 1e-300)) ** 0.2)
        else:
            h *= max(0.1, 0.9 * (tol / err) ** 0.2)
    return f, df


def integrate_taylor(E: float, R: float, m: int, order: int = 30, tol: float = 1e-14) -> tuple[float, float]:
    """(f(R), f'(R)) by Taylor series steps about r_i.

    Multiplying the equation by r^2 and expanding f = sum c_n (r - r_i)^n gives
    r_i^2 (n+2)(n+1) c_{n+2} = -[r_i (n+1)(2n+1) c_{n+1} + (n^2 + E r_i^2 - m^2) c_n
                                 + 2 E r_i c_{n-1} + E c_{n-2}].
    """
    m2 = float(m * m)
    f, df = _start(E, m)
    r = R0
    while r < R:
        h = min(0.5 * r, R - r)
        while True:
            c = [f, df]
            for n in range(order - 1):
                acc = r * (n + 1) * (2 * n + 1) * c[n + 1] + (n * n + E * r * r - m2) * c[n]
                if n >= 1:
                    acc += 2.0 * E * r * c[n - 1]
                if n >= 2:
                    acc += E * c[n - 2]
                c.append(-acc / (r * r * (n + 2) * (n + 1)))
            tail = abs(c[-1]) * h ** (order) + abs(c[-2]) * h ** (order - 1)
            scale = max(abs(f), abs(df) * h, 1e-300)
            if tail <= tol * scale or h < 1e-14:
                break
            h *= 0.5
        fn = 0.0
        dn = 0.0
        for n in range(len(c) - 1, -1, -1):
            fn = fn * h + c[n]
        for n in range(len(c) - 1, 0, -1):
            dn = dn * h + n * c[n]
        r += h
        s = max(abs(fn), abs(dn) * r)
        f, df = fn / s, dn / s
    return f, df


def mismatch(E: float, problem: ShootingProblem, method: str = "rk4", tol: float = 1e-12) -> float:
    """f'(R)/|(f, R f')| - alpha f(R)/|(f, R f')|; sign changes at eigenvalues."""
    if method == "rk4":
        f, df = integrate_rk4(E, problem.R, problem.m, tol)
    elif method == "taylor":
        f, df = integrate_taylor(E, problem.R, problem.m)
    else:
        raise ValueError(f"unknown integrator {method!r}")
    return df - problem.alpha * f


def disk_shooting(problem: ShootingProblem, method: str = "rk4", tol: float = 1e-12, etol: float = 1e-11, scan: int = 64) -> float:
    """Lowest eigenvalue of the Robin disk in angular sector m.

    Scans the bracket upward for the first sign change of the mismatch, then
    bisects to ``etol`` (absolute, floored at a few ulps of E).
    """
    lo, hi = problem.bracket()
    if not lo < hi:
        raise ValueError("empty energy bracket")
    grid = [lo + (hi - lo) * i / scan for i in range(scan + 1)]
    f_prev = mismatch(grid[0], problem, method, tol)
    a = b = None
    for e in grid[1:]:
        f_cur = mismatch(e, problem, method, tol)
        if f_prev == 0.0:
            return grid[0]
        if (f_prev < 0) != (f_cur < 0):
            a, b = e - (hi - lo) / scan, e
            break
        f_prev = f_cur
    if a is None:
        raise BracketError(
            f"no sign change of the shooting mismatch on [{lo}, {hi}] for m={problem.m}; widen E_lo/E_hi"
        )
    fa = f_prev
    while b - a > max(etol, 4.0 * abs(a) * 2.2e-16):
        mid = 0.5 * (a + b)
        fm = mismatch(mid, problem, method, tol)
        if fm == 0.0:
            return mid
        if (fm < 0) == (fa < 0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def cross_validate(value_a: float, value_b: float, tol: float, label: str = "") -> bool:
    """|a - b| <= tol, with a one-line report on the module logger."""
    diff = abs(value_a - value_b)
    ok = bool(diff <= tol)
    log.info("%s %s: %.12g vs %.12g, |diff| = %.3e, tol = %.3e", "PASS" if ok else "FAIL", label, value_a, value_b, diff, tol)
    return ok
