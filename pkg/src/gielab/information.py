"""Gaussian mutual-information functionals (all values in nats).

The central quantity is the outcome mutual information
``f = (1/2) ln(det sigma_A det sigma_B / det sigma_AB)`` of local Gaussian
measurements on the E-conditioned state, together with its decomposition
into an unconditioned part plus an Eve-side correction, and the Gaussian
classical mutual information of a conditional standard form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config
from .errors import (
    DimensionMismatchError,
    InvalidInputError,
    InvalidMeasurementError,
    NumericalDegeneracyError,
)
from .measurement import FiniteMeasurement, GaussianMeasurement, condition_on_e
from .purification import Purification
from .states import StdForm


def _check_nats(value: float, context: str) -> float:
    if value < -config.tolerances().nats_slack or not np.isfinite(value):
        raise NumericalDegeneracyError(f"{context} produced {value}")
    return max(value, 0.0)


def _outcome_ccm(cond: np.ndarray, ga: GaussianMeasurement, gb: GaussianMeasurement):
    """Outcome covariance blocks for single-mode measurements on A and B.

    A finite measurement keeps both quadratures and adds the seed CM; an
    exact homodyne keeps the measured quadrature only (the antisqueezed
    outcome carries no mutual information in the limit).
    """
    rows = []
    for g, sl in ((ga, slice(0, 2)), (gb, slice(2, 4))):
        if g.n_modes != 1:
            raise DimensionMismatchError("measurements on A and B must be single-mode")
        if isinstance(g, FiniteMeasurement):
            rows.append((sl, np.eye(2), g.seed.mat))
        else:
            u = g.directions()[0]
            rows.append((sl, u.reshape(1, 2), np.zeros((1, 1))))
    (sla, wa, na), (slb, wb, nb) = rows
    sig_a = wa @ cond[sla, sla] @ wa.T + na
    sig_b = wb @ cond[slb, slb] @ wb.T + nb
    cross = wa @ cond[sla, slb] @ wb.T
    return sig_a, sig_b, cross


def mutual_information_f(
    pi: Purification,
    ga: GaussianMeasurement,
    gb: GaussianMeasurement,
    ge: GaussianMeasurement | None = None,
) -> float:
    """Outcome mutual information of measurements on A and B given one on E."""
    cond = condition_on_e(pi, ge).mat
    sig_a, sig_b, cross = _outcome_ccm(cond, ga, gb)
    sigma = np.block([[sig_a, cross], [cross.T, sig_b]])
    det_joint = np.linalg.det(sigma)
    if det_joint <= 0.0:
        raise NumericalDegeneracyError(f"joint outcome CCM degenerate, det {det_joint:.3e}")
    value = 0.5 * np.log(np.linalg.det(sig_a) * np.linalg.det(sig_b) / det_joint)
    return _check_nats(float(value), "mutual information")


def f_homodyne_ab(cond: StdForm) -> float:
    """Mutual information of double x-homodyne on a conditional standard form."""
    ab = cond.a * cond.b
    denom = ab - cond.kx * cond.kx
    if denom <= 0.0:
        raise NumericalDegeneracyError(f"a b - kx^2 = {denom} is not positive")
    return _check_nats(0.5 * np.log(ab / denom), "double homodyne mutual information")


def gcmi_condition_g(cond: StdForm) -> float:
    """Optimality gate for the closed-form GCMI.

    ``G = sqrt(a/b) + sqrt(b/a) + 1/sqrt(ab) - sqrt(ab - kx^2)``; the closed
    form is proven optimal whenever G >= 0.
    """
    ab = cond.a * cond.b
    if ab < cond.kx * cond.kx:
        raise InvalidInputError(f"need a b >= kx^2, got ab = {ab}, kx^2 = {cond.kx ** 2}")
    return float(
        np.sqrt(cond.a / cond.b)
        + np.sqrt(cond.b / cond.a)
        + 1.0 / np.sqrt(ab)
        - np.sqrt(ab - cond.kx * cond.kx)
    )


def u_function(cond: StdForm, r_a: float, r_b: float) -> float:
    """Objective of the GCMI minimization over local squeezed measurements.

    ``u = [1 - kx^2/(a_- b_-)][1 - kp^2/(a_+ b_+)]`` with
    ``a_± = a + e^{±2 r}``.  Infinite arguments evaluate the analytic limit.
    """
    a_minus = cond.a + (0.0 if np.isinf(r_a) else np.exp(-2.0 * r_a))
    b_minus = cond.b + (0.0 if np.isinf(r_b) else np.exp(-2.0 * r_b))
    first = 1.0 - cond.kx * cond.kx / (a_minus * b_minus)
    if np.isinf(r_a) or np.isinf(r_b):
        second = 1.0
    else:
        a_plus = cond.a + np.exp(2.0 * r_a)
        b_plus = cond.b + np.exp(2.0 * r_b)
        second = 1.0 - cond.kp * cond.kp / (a_plus * b_plus)
    return float(first * second)


@dataclass(frozen=True)
class GcmiResult:
    value: float
    method: str  # closed_form | numeric
    argmin: tuple[float, float] | None = None


def gcmi_numeric(cond: StdForm, points: int | None = None) -> GcmiResult:
    """Minimize u(rA, rB) on a deterministic grid plus coordinate descent."""
    grid_cfg = config.grid()
    points = grid_cfg.points if points is None else points
    rs = np.linspace(0.0, grid_cfg.squeeze_max, points)
    ra, rb = np.meshgrid(rs, rs, indexing="ij")
    em_a, ep_a = np.exp(-2.0 * ra), np.exp(2.0 * ra)
    em_b, ep_b = np.exp(-2.0 * rb), np.exp(2.0 * rb)
    u = (1.0 - cond.kx**2 / ((cond.a + em_a) * (cond.b + em_b))) * (
        1.0 - cond.kp**2 / ((cond.a + ep_a) * (cond.b + ep_b))
    )
    flat = int(np.argmin(u))
    best = (float(ra.flat[flat]), float(rb.flat[flat]))
    best_val = float(u.flat[flat])
    # analytic r -> infinity edges
    for edge in ((np.inf, np.inf), *((np.inf, r) for r in rs), *((r, np.inf) for r in rs)):
        val = u_function(cond, *edge)
        if val < best_val - 1e-15:
            best_val, best = val, edge
    if np.isfinite(best[0]) and np.isfinite(best[1]):
        best, best_val = _descend(
            lambda x: u_function(cond, x[0], x[1]),
            np.array(best),
            np.zeros(2),
            np.full(2, grid_cfg.squeeze_max),
            grid_cfg.resolution,
        )
        best = tuple(float(x) for x in best)
    if best_val <= 0.0:
        raise NumericalDegeneracyError(f"u minimum degenerate: {best_val}")
    return GcmiResult(value=_check_nats(-0.5 * np.log(best_val), "GCMI"), method="numeric", argmin=best)


def gcmi(cond: StdForm, points: int | None = None) -> GcmiResult:
    """Gaussian classical mutual information of a conditional standard form.

    Returns the closed form when the optimality gate G >= 0 holds, and the
    numeric minimum of u otherwise (flagged ``numeric``; the proven
    optimality domain does not cover that regime).
    """
    if gcmi_condition_g(cond) >= 0.0:
        return GcmiResult(value=f_homodyne_ab(cond), method="closed_form", argmin=(np.inf, np.inf))
    return gcmi_numeric(cond, points=points)


def _descend(fn, x0, lows, highs, resolution, max_sweeps=400):
    """Deterministic pattern-search descent within a box.

    Probes coordinate moves plus pairwise diagonal moves (diagonal valleys
    stall a pure coordinate search), halving the step until it falls below
    ``resolution``.
    """
    x = np.array(x0, dtype=float)
    val = fn(x)
    steps = np.maximum((highs - lows) * 0.05, resolution)
    directions = []
    for i in range(x.size):
        e = np.zeros(x.size)
        e[i] = 1.0
        directions.append(e)
        for j in range(i + 1, x.size):
            d = np.zeros(x.size)
            d[i] = 1.0
            d[j] = 1.0
            directions.append(d / np.sqrt(2.0))
            d = d.copy()
            d[j] = -1.0
            directions.append(d / np.sqrt(2.0))
    for _ in range(max_sweeps):
        improved = False
        for direction in directions:
            for sign in (1.0, -1.0):
                trial = np.clip(x + sign * steps * direction, lows, highs)
                if np.array_equal(trial, x):
                    continue
                tval = fn(trial)
                if tval < val - 1e-15:
                    x, val = trial, tval
                    improved = True
        if not improved:
            steps *= 0.5
            if steps.max() < resolution:
                break
    return x, val


def f_decomposed(
    pi: Purification,
    ga: FiniteMeasurement,
    gb: FiniteMeasurement,
    ge: FiniteMeasurement | None = None,
) -> tuple[float, float]:
    """Split f into the unconditioned mutual information plus Eve's correction.

    Returns ``(i_ab, k_eab)`` with ``i_ab + k_eab = mutual_information_f``.
    ``k_eab`` is built from determinant ratios of the E-side conditional
    covariances; it vanishes when E decouples.
    """
    if not isinstance(ga, FiniteMeasurement) or not isinstance(gb, FiniteMeasurement):
        raise InvalidMeasurementError("f_decomposed needs finite measurements on A and B")
    gamma_ab = pi.gamma_ab.mat
    gamma_a, gamma_b = gamma_ab[:2, :2], gamma_ab[2:, 2:]
    noise = np.block(
        [
            [ga.seed.mat, np.zeros((2, 2))],
            [np.zeros((2, 2)), gb.seed.mat],
        ]
    )
    det = np.linalg.det
    denom = det(noise + gamma_ab)
    if denom <= 0.0:
        raise NumericalDegeneracyError("degenerate joint outcome CCM")
    i_ab = 0.5 * np.log(det(ga.seed.mat + gamma_a) * det(gb.seed.mat + gamma_b) / denom)
    if pi.r_count == 0:
        return _check_nats(float(i_ab), "I(A;B)"), 0.0
    if not isinstance(ge, FiniteMeasurement):
        raise InvalidMeasurementError("f_decomposed needs a finite measurement on E")
    gamma_ae = pi.gamma_abe[:2, :]
    gamma_be = pi.gamma_abe[2:, :]
    x_a = pi.gamma_e - gamma_ae.T @ np.linalg.inv(ga.seed.mat + gamma_a) @ gamma_ae
    x_b = pi.gamma_e - gamma_be.T @ np.linalg.inv(gb.seed.mat + gamma_b) @ gamma_be
    x_ab = pi.gamma_e - pi.gamma_abe.T @ np.linalg.inv(noise + gamma_ab) @ pi.gamma_abe
    seed = ge.seed.mat
    ratio = (det(seed + x_a) * det(seed + x_b)) / (det(seed + x_ab) * det(seed + pi.gamma_e))
    if ratio <= 0.0:
        raise NumericalDegeneracyError("degenerate Eve-side determinant ratio")
    return _check_nats(float(i_ab), "I(A;B)"), float(0.5 * np.log(ratio))
