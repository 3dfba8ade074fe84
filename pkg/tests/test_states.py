import numpy as np
import pytest

from gielab.errors import InvalidFamilyParamsError, InvalidInputError, UnphysicalStateError
from gielab.states import (
    StdForm,
    classify,
    is_separable,
    make_family,
    ppt_min_symplectic_eigenvalue,
    rotate_locally,
    std_form_cm,
    to_std_form,
)
from gielab.symplectic import symplectic_eigenvalues


class TestStdFormCm:
    def test_vacuum(self):
        assert np.allclose(std_form_cm(StdForm(1, 1, 0, 0)).mat, np.eye(4))

    def test_worked_point_spectrum(self):
        cov = std_form_cm(StdForm(1.5, 1.5, 1.0, 0.5))
        assert np.allclose(symplectic_eigenvalues(cov), [np.sqrt(2.5), 1.0], atol=1e-10)

    def test_physical_isotropic_point(self):
        cov = std_form_cm(StdForm(1.2, 1.2, 0.5, 0.5))  # a^2 - k^2 = 1.19 >= 1
        assert cov.is_physical()

    def test_unphysical_parameters_rejected(self):
        with pytest.raises(UnphysicalStateError):
            StdForm(1.2, 1.2, 0.8, 0.8)  # a^2 - k^2 = 0.8 < 1

    def test_sign_convention_enforced(self):
        with pytest.raises(InvalidInputError):
            StdForm(2.0, 2.0, 0.3, 0.9)


class TestToStdForm:
    def test_idempotent_on_standard_form(self):
        p = StdForm(1.5, 1.3, 0.6, 0.2)
        q = to_std_form(std_form_cm(p))
        for field in ("a", "b", "kx", "kp"):
            assert np.isclose(getattr(q, field), getattr(p, field), atol=1e-10)

    def test_recovers_after_local_rotations(self, rng):
        for _ in range(100):
            a = 1.0 + rng.random() * 2
            b = 1.0 + rng.random() * 2
            kx = rng.random() * np.sqrt(max(a * b - 1, 0)) * 0.9
            kp = rng.uniform(-kx, kx)
            try:
                p = StdForm(a, b, kx, kp)
            except UnphysicalStateError:
                continue
            rotated = rotate_locally(std_form_cm(p), rng.random() * np.pi, rng.random() * np.pi)
            q = to_std_form(rotated)
            assert np.isclose(q.a, p.a, atol=1e-8)
            assert np.isclose(q.b, p.b, atol=1e-8)
            assert np.isclose(q.kx, p.kx, atol=1e-8)
            assert np.isclose(q.kp, p.kp, atol=1e-8)

    def test_conditioned_two_mode_squeezer_state(self):
        # delta_AB|E assembled from the conditional variances of a squeezed
        # pair must reduce to the closed-form tilde parameters
        a, b = 2.0, 1.5
        x_sq = (a + 1) / (a - b + 2)
        y_sq = (b - 1) / (a - b + 2)
        nu_tilde = 1 + a - b
        vx, vp = 3.0, 1.5
        cvx = (nu_tilde * vx + 1) / (nu_tilde + vx)
        cvp = (nu_tilde * vp + 1) / (nu_tilde + vp)
        delta = np.diag(
            [x_sq * cvx + y_sq, x_sq * cvp + y_sq, y_sq * cvx + x_sq, y_sq * cvp + x_sq]
        )
        xy = np.sqrt(x_sq * y_sq)
        delta[0, 2] = delta[2, 0] = xy * (cvx + 1)
        delta[1, 3] = delta[3, 1] = -xy * (cvp + 1)
        q = to_std_form(delta)
        lam_a = ((x_sq * cvx + y_sq) / (x_sq * cvp + y_sq)) ** 0.25
        lam_b = ((y_sq * cvx + x_sq) / (y_sq * cvp + x_sq)) ** 0.25
        assert np.isclose(q.a, np.sqrt((x_sq * cvx + y_sq) * (x_sq * cvp + y_sq)), atol=1e-10)
        assert np.isclose(q.b, np.sqrt((y_sq * cvx + x_sq) * (y_sq * cvp + x_sq)), atol=1e-10)
        assert np.isclose(q.kx, xy * (cvx + 1) / (lam_a * lam_b), atol=1e-10)
        assert np.isclose(q.kp, xy * (cvp + 1) * lam_a * lam_b, atol=1e-10)


class TestSeparability:
    def test_entangled_isotropic_point(self):
        p = StdForm(1.2, 1.2, 0.5, 0.5)
        assert not is_separable(p)
        assert np.isclose(ppt_min_symplectic_eigenvalue(p), 0.7, atol=1e-12)

    def test_vacuum_separable(self):
        assert is_separable(StdForm(1, 1, 0, 0))

    def test_symmetric_criterion_boundary(self):
        # (a - k)^2 = 4 >= 1: separable
        assert is_separable(StdForm(3.0, 3.0, 1.0, 1.0))

    def test_agrees_with_symmetric_inequality(self, rng):
        for _ in range(300):
            a = 1.0 + rng.random() * 2
            kx = rng.random() * np.sqrt(max(a * a - 1, 0))
            kp = rng.uniform(0, kx)
            try:
                p = StdForm(a, a, kx, kp)
            except UnphysicalStateError:
                continue
            criterion = (a - kx) * (a - kp) >= 1.0
            assert is_separable(p) == criterion

    def test_positive_correlations_short_circuit(self):
        # kp < 0 means both correlation signs agree: separable outright
        assert is_separable(StdForm(2.0, 2.0, 1.0, -1.0))

    def test_invariant_under_local_rotations(self, rng):
        p = StdForm(1.4, 1.1, 0.4, 0.25)  # physical (nu2 = 1.04), PPT-entangled
        expected = is_separable(p)
        for _ in range(20):
            rotated = rotate_locally(std_form_cm(p), rng.random() * np.pi, rng.random() * np.pi)
            assert is_separable(to_std_form(rotated)) == expected


class TestMakeFamily:
    def test_sym_glems_constraint(self):
        fam = make_family("sym_glems", a=1.5, kp=0.5)
        assert np.isclose(fam.std.kx, 1.0, atol=1e-12)  # a - 1/(a + kp)
        nus = symplectic_eigenvalues(std_form_cm(fam.std))
        assert abs(nus[1] - 1.0) < 1e-9

    def test_asym_glems_coupling(self):
        fam = make_family("asym_glems", a=2.0, b=1.5)
        assert np.isclose(fam.std.kx, np.sqrt(1.5), atol=1e-12)
        nus = symplectic_eigenvalues(std_form_cm(fam.std))
        assert abs(nus[1] - 1.0) < 1e-10

    def test_asym_glems_lower_branch(self):
        fam = make_family("asym_glems", a=1.5, b=2.0)
        assert np.isclose(fam.std.kx, np.sqrt(0.5 * 3.0), atol=1e-12)
        nus = symplectic_eigenvalues(std_form_cm(fam.std))
        assert abs(nus[1] - 1.0) < 1e-10

    def test_cv_ghz_zero_squeezing_is_vacuum(self):
        fam = make_family("cv_ghz", r=0.0)
        assert fam.tag == "sym_glems"
        for field, want in (("a", 1.0), ("b", 1.0), ("kx", 0.0), ("kp", 0.0)):
            assert np.isclose(getattr(fam.std, field), want, atol=1e-12)

    def test_cv_ghz_is_glems(self):
        for r in (0.2, 0.5, 1.1):
            fam = make_family("cv_ghz", r=r)
            nus = symplectic_eigenvalues(std_form_cm(fam.std))
            assert abs(nus[1] - 1.0) < 1e-9

    def test_pure_family_unit_spectrum(self):
        fam = make_family("pure", a=2.5)
        nus = symplectic_eigenvalues(std_form_cm(fam.std))
        assert np.allclose(nus, 1.0, atol=1e-9)

    def test_constraint_violations_rejected(self):
        with pytest.raises(InvalidFamilyParamsError):
            make_family("sym_glems", a=1.1, kp=0.9)  # a^2 - kp^2 < 1
        with pytest.raises(InvalidFamilyParamsError):
            make_family("sym_sq_thermal", a=1.2, k=0.8)
        with pytest.raises(InvalidFamilyParamsError):
            make_family("asym_glems", a=0.9, b=1.5)
        with pytest.raises(InvalidFamilyParamsError):
            make_family("cv_ghz", r=-0.1)
        with pytest.raises(InvalidFamilyParamsError):
            make_family("unknown", a=1.0)


class TestClassify:
    def test_families_round_trip(self):
        assert classify(make_family("pure", a=2.0).std).tag == "pure"
        assert classify(make_family("sym_glems", a=1.5, kp=0.5).std).tag == "sym_glems"
        assert classify(make_family("sym_sq_thermal", a=1.2, k=0.5).std).tag == "sym_sq_thermal"
        assert classify(make_family("asym_glems", a=2.0, b=1.5).std).tag == "asym_glems"

    def test_generic_catchall(self):
        assert classify(StdForm(2.0, 1.4, 0.6, 0.3)).tag == "generic"
