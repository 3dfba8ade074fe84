"""Gaussian purifications of two-mode states.

A mixed two-mode state with R symplectic eigenvalues above one is purified
by pairing each noisy Williamson mode with one extra mode in a two-mode
squeezed state, then pulling the system modes back with the inverse
Williamson transformation.  The asymmetric squeezed-thermal GLEMS family
additionally has an analytic single-extra-mode form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config
from .errors import DegenerateFamilyError, InvalidFamilyParamsError, UnphysicalStateError
from .symplectic import SIGMA_Z, CovMat, symplectic_eigenvalues, williamson


@dataclass(frozen=True)
class Purification:
    """Blocks (gamma_AB, gamma_ABE, gamma_E) of a pure (2+R)-mode CM."""

    gamma_ab: CovMat
    gamma_abe: np.ndarray  # 4 x 2R, read-only
    gamma_e: np.ndarray    # 2R x 2R, read-only
    r_count: int

    def __post_init__(self):
        abe = np.asarray(self.gamma_abe, dtype=float).reshape(4, 2 * self.r_count)
        e = np.asarray(self.gamma_e, dtype=float).reshape(2 * self.r_count, 2 * self.r_count)
        abe.flags.writeable = False
        e.flags.writeable = False
        object.__setattr__(self, "gamma_abe", abe)
        object.__setattr__(self, "gamma_e", e)

    def gamma_pi(self) -> CovMat:
        """Assembled covariance matrix of the full pure state."""
        if self.r_count == 0:
            return self.gamma_ab
        top = np.hstack([self.gamma_ab.mat, self.gamma_abe])
        bottom = np.hstack([self.gamma_abe.T, self.gamma_e])
        return CovMat(np.vstack([top, bottom]))

    def purity_defect(self) -> float:
        """Largest deviation of the assembled symplectic spectrum from one."""
        return float(np.abs(symplectic_eigenvalues(self.gamma_pi()) - 1.0).max())


def purify(gamma) -> Purification:
    """Minimal Gaussian purification of a physical two-mode CM.

    The E block is ``diag(nu_i I)`` over the eigenvalues above the
    ``1 + physical_atol`` cutoff; states on the cutoff resolve toward the
    smaller purifying system.  Pure inputs return empty E blocks.
    """
    cov = gamma if isinstance(gamma, CovMat) else CovMat(np.asarray(gamma, dtype=float))
    if cov.n_modes != 2:
        raise UnphysicalStateError(f"purify expects a two-mode CM, got {cov.n_modes} modes")
    tol = config.tolerances()
    decomp = williamson(cov)
    nus = decomp.nus
    noisy = [i for i, nu in enumerate(nus) if nu > 1.0 + tol.physical_atol]
    r_count = len(noisy)
    if r_count == 0:
        return Purification(cov, np.zeros((4, 0)), np.zeros((0, 0)), 0)
    abe0 = np.zeros((4, 2 * r_count))
    gamma_e = np.zeros((2 * r_count, 2 * r_count))
    for col, i in enumerate(noisy):
        abe0[2 * i : 2 * i + 2, 2 * col : 2 * col + 2] = np.sqrt(nus[i] ** 2 - 1.0) * SIGMA_Z
        gamma_e[2 * col : 2 * col + 2, 2 * col : 2 * col + 2] = nus[i] * np.eye(2)
    gamma_abe = decomp.s.inverse() @ abe0
    pi = Purification(cov, gamma_abe, gamma_e, r_count)
    defect = pi.purity_defect()
    if defect > tol.purity_atol:
        raise UnphysicalStateError(f"purification impure, spectrum defect {defect:.3e}")
    return pi


def purify_asym_glems(a: float, b: float) -> Purification:
    """Analytic three-mode purification of an asymmetric squeezed-thermal GLEMS."""
    if a < 1.0 or b < 1.0:
        raise InvalidFamilyParamsError(f"asym_glems needs a, b >= 1, got ({a}, {b})")
    if a == b:
        raise DegenerateFamilyError("a = b is a pure state; use the pure-state path")
    eye = np.eye(2)
    if a > b:
        k = np.sqrt((a + 1.0) * (b - 1.0))
        gamma_abe = np.vstack([np.sqrt((a - b) * (a + 1.0)) * SIGMA_Z, np.sqrt((a - b) * (b - 1.0)) * eye])
    else:
        k = np.sqrt((a - 1.0) * (b + 1.0))
        gamma_abe = np.vstack([np.sqrt((b - a) * (a - 1.0)) * eye, np.sqrt((b - a) * (b + 1.0)) * SIGMA_Z])
    gamma_ab = CovMat(
        np.array(
            [
                [a, 0.0, k, 0.0],
                [0.0, a, 0.0, -k],
                [k, 0.0, b, 0.0],
                [0.0, -k, 0.0, b],
            ]
        )
    )
    gamma_e = (1.0 + abs(a - b)) * eye
    pi = Purification(gamma_ab, gamma_abe, gamma_e, 1)
    defect = pi.purity_defect()
    if defect > config.tolerances().purity_atol:
        raise UnphysicalStateError(f"purification impure, spectrum defect {defect:.3e}")
    return pi
