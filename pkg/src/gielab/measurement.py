"""Gaussian measurements, classical covariance matrices and conditioning.

Measurements are either a finite Gaussian seed CM or an exact homodyne
limit given by one quadrature angle per mode.  Everything works at the
level of second moments; outcome samples are never materialized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config
from .errors import (
    DimensionMismatchError,
    InvalidConditioningError,
    InvalidInputError,
    InvalidMeasurementError,
)
from .purification import Purification
from .symplectic import CovMat, rotation, symplectic_eigenvalues


@dataclass(frozen=True)
class FiniteMeasurement:
    """Gaussian POVM generated by displacing a physical seed state."""

    seed: CovMat

    def __post_init__(self):
        nus = symplectic_eigenvalues(self.seed)
        # the eigenvalue error floor grows with the seed norm; scale the gate
        slack = config.tolerances().physical_atol * max(1.0, float(np.abs(self.seed.mat).max()))
        if nus.size and nus.min() < 1.0 - slack:
            raise InvalidMeasurementError(f"seed CM unphysical, min symplectic eigenvalue {nus.min():.12g}")

    @property
    def n_modes(self) -> int:
        return self.seed.n_modes


@dataclass(frozen=True)
class HomodyneMeasurement:
    """Exact homodyne limit: one measured quadrature angle per mode.

    Angle 0 measures x, pi/2 measures p; angles are reduced modulo pi.
    """

    angles: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "angles", tuple(float(t) % np.pi for t in self.angles))

    @property
    def n_modes(self) -> int:
        return len(self.angles)

    def directions(self) -> np.ndarray:
        """Unit vectors of the measured quadratures, stacked (n_modes, 2)."""
        return np.array([[np.cos(t), np.sin(t)] for t in self.angles])


GaussianMeasurement = FiniteMeasurement | HomodyneMeasurement


def heterodyne(n_modes: int = 1) -> FiniteMeasurement:
    """Projection onto coherent states: identity seed CM."""
    return FiniteMeasurement(CovMat(np.eye(2 * n_modes)))


def homodyne(angles) -> HomodyneMeasurement:
    return HomodyneMeasurement(tuple(np.atleast_1d(angles)))


def general_single_mode(phi: float, tau: float, t: float) -> FiniteMeasurement:
    """Rotated squeezed-thermal seed ``P(phi) diag(tau e^{2t}, tau e^{-2t}) P^T``."""
    if tau < 1.0 or t < 0.0:
        raise InvalidMeasurementError(f"need tau >= 1 and t >= 0, got ({tau}, {t})")
    p = rotation(phi)
    seed = p @ np.diag([tau * np.exp(2.0 * t), tau * np.exp(-2.0 * t)]) @ p.T
    return FiniteMeasurement(CovMat(seed))


@dataclass(frozen=True)
class Ccm:
    """Classical covariance matrix of measurement outcomes.

    ``partition`` holds the outcome dimensions of the A, B and E blocks.
    """

    mat: np.ndarray
    partition: tuple[int, int, int]

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=float)
        if mat.shape[0] != sum(self.partition):
            raise DimensionMismatchError(f"partition {self.partition} does not match {mat.shape}")
        eigs = np.linalg.eigvalsh(0.5 * (mat + mat.T))
        if eigs.size and eigs.min() < -1e-10 * max(1.0, eigs.max()):
            raise InvalidInputError(f"CCM indefinite, min eigenvalue {eigs.min():.3e}")
        mat = 0.5 * (mat + mat.T)
        mat.flags.writeable = False
        object.__setattr__(self, "mat", mat)

    def conditional_ab(self) -> np.ndarray:
        """Schur complement of the E block: CCM of (A, B) outcomes given E."""
        n_ab = self.partition[0] + self.partition[1]
        alpha = self.mat[:n_ab, :n_ab]
        if self.partition[2] == 0:
            return alpha.copy()
        beta = self.mat[:n_ab, n_ab:]
        delta = self.mat[n_ab:, n_ab:]
        return alpha - beta @ np.linalg.pinv(delta, rcond=config.tolerances().pinv_rcond, hermitian=True) @ beta.T


def assemble_ccm(pi: Purification, ga: FiniteMeasurement, gb: FiniteMeasurement, ge: FiniteMeasurement | None) -> Ccm:
    """Joint outcome CCM for finite measurements on A, B and E.

    The blocks follow the AB|E partitioning: ``alpha = gamma_AB + Gamma_A + Gamma_B``
    (direct sum), ``beta = gamma_ABE`` and ``delta = gamma_E + Gamma_E``.
    """
    for g, name in ((ga, "A"), (gb, "B")):
        if not isinstance(g, FiniteMeasurement):
            raise InvalidMeasurementError(f"assemble_ccm needs a finite measurement on {name}")
        if g.n_modes != 1:
            raise DimensionMismatchError(f"measurement on {name} must be single-mode")
    alpha = pi.gamma_ab.mat + np.block(
        [
            [ga.seed.mat, np.zeros((2, 2))],
            [np.zeros((2, 2)), gb.seed.mat],
        ]
    )
    if pi.r_count == 0:
        return Ccm(alpha, (2, 2, 0))
    if not isinstance(ge, FiniteMeasurement):
        raise InvalidMeasurementError("assemble_ccm needs a finite measurement on E")
    if ge.n_modes != pi.r_count:
        raise DimensionMismatchError(f"E measurement has {ge.n_modes} modes, purification has {pi.r_count}")
    delta = pi.gamma_e + ge.seed.mat
    top = np.hstack([alpha, pi.gamma_abe])
    bottom = np.hstack([pi.gamma_abe.T, delta])
    return Ccm(np.vstack([top, bottom]), (2, 2, 2 * pi.r_count))


def _conditioning_kernel(gamma_e: np.ndarray, ge: GaussianMeasurement) -> np.ndarray:
    """The matrix M with conditional CM ``gamma_AB - gamma_ABE M gamma_ABE^T``."""
    rcond = config.tolerances().pinv_rcond
    if isinstance(ge, FiniteMeasurement):
        return np.linalg.pinv(gamma_e + ge.seed.mat, rcond=rcond, hermitian=True)
    # Exact homodyne: project onto the measured quadrature directions and
    # pseudoinvert the projected block (the t -> infinity limit of the
    # finite formula).
    dirs = ge.directions()
    proj = np.zeros_like(gamma_e)
    for j, u in enumerate(dirs):
        proj[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = np.outer(u, u)
    projected = proj @ gamma_e @ proj
    return np.linalg.pinv(projected, rcond=rcond, hermitian=True)


def condition_on_e(pi: Purification, ge: GaussianMeasurement | None) -> CovMat:
    """Conditional CM of modes A, B after a Gaussian measurement on E."""
    if pi.r_count == 0:
        return pi.gamma_ab
    if ge is None:
        raise InvalidMeasurementError("purification has a nonempty E block; a measurement is required")
    if ge.n_modes != pi.r_count:
        raise DimensionMismatchError(f"E measurement has {ge.n_modes} modes, purification has {pi.r_count}")
    kernel = _conditioning_kernel(pi.gamma_e, ge)
    cond = pi.gamma_ab.mat - pi.gamma_abe @ kernel @ pi.gamma_abe.T
    return CovMat(cond)


def apply_classical_channel(sigma: Ccm, x: np.ndarray, y: np.ndarray) -> Ccm:
    """Act with the classical Gaussian channel ``d_E -> X d_E + y`` on a CCM.

    Returns the joint CCM of the A, B outcomes with the transformed E
    variables; its ``conditional_ab`` is ``alpha - beta X^T (X delta X^T + Y)^+ X beta^T``.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    n_ab = sigma.partition[0] + sigma.partition[1]
    n_e = sigma.partition[2]
    if x.shape[1] != n_e:
        raise DimensionMismatchError(f"channel matrix maps {x.shape[1]} outcomes, CCM has {n_e}")
    if y.shape != (x.shape[0], x.shape[0]):
        raise DimensionMismatchError(f"noise CCM must be {x.shape[0]} x {x.shape[0]}, got {y.shape}")
    eigs = np.linalg.eigvalsh(0.5 * (y + y.T))
    if eigs.size and eigs.min() < -1e-10 * max(1.0, abs(eigs).max()):
        raise InvalidConditioningError("channel noise CCM must be positive semidefinite")
    alpha = sigma.mat[:n_ab, :n_ab]
    beta = sigma.mat[:n_ab, n_ab:]
    delta = sigma.mat[n_ab:, n_ab:]
    top = np.hstack([alpha, beta @ x.T])
    bottom = np.hstack([x @ beta.T, x @ delta @ x.T + y])
    return Ccm(np.vstack([top, bottom]), (sigma.partition[0], sigma.partition[1], x.shape[0]))
