"""Two-mode Gaussian state families, standard-form reduction and separability.

The standard form carries four scalars (a, b, kx, kp): diagonal blocks
``a I`` and ``b I`` and off-diagonal block ``diag(kx, -kp)`` with
``kx >= |kp|``.  Positive kp is the entanglement-candidate convention;
kp <= 0 means both correlation signs agree, which is always separable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import config
from .errors import InvalidFamilyParamsError, InvalidInputError, UnphysicalStateError
from .symplectic import CovMat, rotation, std_form_symplectic_eigenvalues


@dataclass(frozen=True)
class StdForm:
    """Standard-form parameters of a two-mode covariance matrix."""

    a: float
    b: float
    kx: float
    kp: float

    def __post_init__(self):
        tol = config.tolerances()
        if self.a < 1.0 - tol.physical_atol or self.b < 1.0 - tol.physical_atol:
            raise UnphysicalStateError(f"local purities need a, b >= 1, got ({self.a}, {self.b})")
        if self.kx < 0.0 or self.kx < abs(self.kp) - tol.family_atol:
            raise InvalidInputError(f"standard form needs kx >= |kp| >= 0, got ({self.kx}, {self.kp})")
        nu1, nu2 = self.symplectic_eigenvalues()
        if nu2 < 1.0 - tol.std_form_atol:
            raise UnphysicalStateError(f"unphysical standard form, nu2 = {nu2:.12g}")

    def symplectic_eigenvalues(self) -> tuple[float, float]:
        return std_form_symplectic_eigenvalues(self.a, self.b, self.kx, self.kp)

    def is_symmetric(self, atol: float = 1e-12) -> bool:
        return abs(self.a - self.b) <= atol * max(self.a, self.b)


@dataclass(frozen=True)
class StateFamily:
    """A classified two-mode state: family tag plus its defining scalars."""

    tag: str  # pure | sym_glems | sym_sq_thermal | asym_glems | generic
    params: dict = field(default_factory=dict)
    std: StdForm = None

    def __post_init__(self):
        if self.tag not in ("pure", "sym_glems", "sym_sq_thermal", "asym_glems", "generic"):
            raise InvalidFamilyParamsError(f"unknown family tag {self.tag!r}")


def std_form_cm(p: StdForm) -> CovMat:
    """Assemble the 4x4 covariance matrix of a standard form."""
    a, b, kx, kp = p.a, p.b, p.kx, p.kp
    mat = np.array(
        [
            [a, 0.0, kx, 0.0],
            [0.0, a, 0.0, -kp],
            [kx, 0.0, b, 0.0],
            [0.0, -kp, 0.0, b],
        ]
    )
    return CovMat(mat)


def std_form_params(gamma) -> tuple[float, float, float, float]:
    """Raw standard-form invariants (a, b, kx, kp) of a two-mode CM.

    Computed from det A, det B, det C and det gamma, which fix the
    standard form uniquely.  No physicality validation is applied; use
    ``to_std_form`` for a checked ``StdForm``.
    """
    mat = gamma.mat if isinstance(gamma, CovMat) else np.asarray(gamma, dtype=float)
    if mat.shape != (4, 4):
        raise InvalidInputError(f"expected a two-mode covariance matrix, got {mat.shape}")
    block_a = mat[:2, :2]
    block_b = mat[2:, 2:]
    block_c = mat[:2, 2:]
    det_a, det_b, det_c = np.linalg.det(block_a), np.linalg.det(block_b), np.linalg.det(block_c)
    det_g = np.linalg.det(mat)
    if det_a <= 0.0 or det_b <= 0.0:
        raise UnphysicalStateError("local block determinant is not positive")
    a, b = np.sqrt(det_a), np.sqrt(det_b)
    # cx^2 and cp^2 are the roots of t^2 - s t + det_c^2 = 0
    s = (det_a * det_b + det_c * det_c - det_g) / (a * b)
    disc = max(s * s - 4.0 * det_c * det_c, 0.0)
    root = np.sqrt(disc)
    cx_sq = max((s + root) / 2.0, 0.0)
    cp_sq = max((s - root) / 2.0, 0.0)
    cx = np.sqrt(cx_sq)
    cp = np.sqrt(cp_sq)
    if det_c < 0.0:
        cp = -cp
    return float(a), float(b), float(cx), float(-cp)


def to_std_form(gamma) -> StdForm:
    """Reduce a two-mode covariance matrix to its standard form.

    Idempotent on standard-form inputs; raises for unphysical input.
    """
    a, b, kx, kp = std_form_params(gamma)
    return StdForm(a=a, b=b, kx=kx, kp=kp)


def ppt_min_symplectic_eigenvalue(p: StdForm) -> float:
    """Smallest symplectic eigenvalue of the partially transposed CM."""
    _, nu2 = std_form_symplectic_eigenvalues(p.a, p.b, p.kx, -p.kp)
    return nu2


def is_separable(p: StdForm) -> bool:
    """PPT criterion, necessary and sufficient for 1x1 mode bipartitions."""
    if p.kp <= 0.0:  # both correlations share a sign: separable outright
        return True
    return ppt_min_symplectic_eigenvalue(p) >= 1.0 - config.tolerances().ppt_atol


def _cv_ghz_std(r: float) -> StdForm:
    xp = (np.exp(2.0 * r) + 2.0 * np.exp(-2.0 * r)) / 3.0
    xm = (np.exp(-2.0 * r) + 2.0 * np.exp(2.0 * r)) / 3.0
    a = np.sqrt(xp * xm)
    kx = np.sqrt(xm / xp) * (xm - xp)
    kp = np.sqrt(xp / xm) * (xm - xp)
    return StdForm(a=float(a), b=float(a), kx=float(kx), kp=float(kp))


def make_family(tag: str, **params) -> StateFamily:
    """Construct a state family instance from its defining scalars.

    Tags and parameters:
        pure(a)                two-mode squeezed vacuum, k = sqrt(a^2 - 1)
        sym_glems(a, kp)       one unit symplectic eigenvalue, kx = a - 1/(a + kp)
        sym_sq_thermal(a, k)   kx = kp = k
        asym_glems(a, b)       k fixed by the unit-eigenvalue branch
        cv_ghz(r)              two-mode reduction of the CV GHZ state
                               (a symmetric GLEMS instance)
    """
    tol = config.tolerances()
    if tag == "pure":
        a = float(params["a"])
        if a < 1.0:
            raise InvalidFamilyParamsError(f"pure family needs a >= 1, got {a}")
        k = np.sqrt(max(a * a - 1.0, 0.0))
        std = StdForm(a=a, b=a, kx=float(k), kp=float(k))
        return StateFamily(tag="pure", params={"a": a}, std=std)
    if tag == "sym_glems":
        a, kp = float(params["a"]), float(params["kp"])
        if a < 1.0 or kp < 0.0:
            raise InvalidFamilyParamsError(f"sym_glems needs a >= 1 and kp >= 0, got ({a}, {kp})")
        if a * a - kp * kp < 1.0 - tol.family_atol:
            raise InvalidFamilyParamsError(f"sym_glems needs a^2 - kp^2 >= 1, got {a * a - kp * kp}")
        kx = a - 1.0 / (a + kp)
        std = StdForm(a=a, b=a, kx=float(kx), kp=kp)
        return StateFamily(tag="sym_glems", params={"a": a, "kp": kp}, std=std)
    if tag == "sym_sq_thermal":
        a, k = float(params["a"]), float(params["k"])
        if a < 1.0 or k < 0.0 or a * a - k * k < 1.0 - tol.family_atol:
            raise InvalidFamilyParamsError(f"sym_sq_thermal needs a^2 - k^2 >= 1, got ({a}, {k})")
        std = StdForm(a=a, b=a, kx=k, kp=k)
        return StateFamily(tag="sym_sq_thermal", params={"a": a, "k": k}, std=std)
    if tag == "asym_glems":
        a, b = float(params["a"]), float(params["b"])
        if a < 1.0 or b < 1.0:
            raise InvalidFamilyParamsError(f"asym_glems needs a, b >= 1, got ({a}, {b})")
        k = np.sqrt((a + 1.0) * (b - 1.0)) if a >= b else np.sqrt((a - 1.0) * (b + 1.0))
        std = StdForm(a=a, b=b, kx=float(k), kp=float(k))
        return StateFamily(tag="asym_glems", params={"a": a, "b": b}, std=std)
    if tag == "cv_ghz":
        r = float(params["r"])
        if r < 0.0:
            raise InvalidFamilyParamsError(f"cv_ghz needs r >= 0, got {r}")
        std = _cv_ghz_std(r)
        return StateFamily(tag="sym_glems", params={"a": std.a, "kp": std.kp}, std=std)
    raise InvalidFamilyParamsError(f"unknown family tag {tag!r}")


def classify(p: StdForm, atol: float | None = None) -> StateFamily:
    """Classify a standard form into the family hierarchy.

    Precedence: pure, then symmetric GLEMS, then symmetric squeezed
    thermal, then asymmetric squeezed-thermal GLEMS, else generic.
    """
    atol = config.tolerances().classify_atol if atol is None else atol
    nu1, nu2 = p.symplectic_eigenvalues()
    symmetric = abs(p.a - p.b) <= atol
    isotropic = abs(p.kx - p.kp) <= atol
    glems = abs(nu2 - 1.0) <= atol
    if abs(nu1 - 1.0) <= atol and glems:
        return StateFamily(tag="pure", params={"a": p.a}, std=p)
    if symmetric and glems:
        return StateFamily(tag="sym_glems", params={"a": p.a, "kp": p.kp}, std=p)
    if symmetric and isotropic:
        return StateFamily(tag="sym_sq_thermal", params={"a": p.a, "k": p.kx}, std=p)
    if isotropic and glems:
        return StateFamily(tag="asym_glems", params={"a": p.a, "b": p.b}, std=p)
    return StateFamily(tag="generic", params={}, std=p)


def rotate_locally(gamma, phi_a: float, phi_b: float) -> CovMat:
    """Conjugate a two-mode CM by local rotations P(phi_A) + P(phi_B)."""
    mat = gamma.mat if isinstance(gamma, CovMat) else np.asarray(gamma, dtype=float)
    s = np.zeros((4, 4))
    s[:2, :2] = rotation(phi_a)
    s[2:, 2:] = rotation(phi_b)
    return CovMat(s @ mat @ s.T)
