import numpy as np
import pytest

from gielab.errors import NumericalDegeneracyError
from gielab.information import (
    f_decomposed,
    f_homodyne_ab,
    gcmi,
    gcmi_condition_g,
    gcmi_numeric,
    mutual_information_f,
    u_function,
)
from gielab.measurement import FiniteMeasurement, general_single_mode, heterodyne, homodyne
from gielab.purification import Purification, purify
from gielab.states import StdForm, make_family, std_form_cm
from gielab.symplectic import CovMat, rotation

J = np.array([[0.0, 1.0], [-1.0, 0.0]])


def _pi(tag, **params):
    return purify(std_form_cm(make_family(tag, **params).std))


class TestMutualInformationF:
    def test_product_state_gives_zero(self):
        pi = purify(CovMat(np.diag([2.0, 2.0, 3.0, 3.0])))
        value = mutual_information_f(pi, heterodyne(1), heterodyne(1), heterodyne(pi.r_count))
        assert abs(value) < 1e-12

    def test_pure_tmsv_heterodyne(self):
        pi = _pi("pure", a=3.0)
        value = mutual_information_f(pi, heterodyne(1), heterodyne(1))
        assert np.isclose(value, np.log(2.0), atol=1e-12)  # ln((a+1)/2)

    def test_sym_glems_triple_homodyne_reaches_u3(self):
        pi = _pi("sym_glems", a=1.5, kp=0.5)
        value = mutual_information_f(pi, homodyne([0.0]), homodyne([0.0]), homodyne([0.0]))
        assert np.isclose(value, 0.05889151782819164, atol=1e-12)

    def test_invariant_under_joint_local_rotations(self, rng):
        fam = make_family("sym_sq_thermal", a=1.3, k=0.6)
        pi = _pi("sym_sq_thermal", a=1.3, k=0.6)
        base = mutual_information_f(pi, homodyne([0.2]), homodyne([1.1]), heterodyne(2))
        for _ in range(15):
            phi_a, phi_b = rng.random() * np.pi, rng.random() * np.pi
            s = np.zeros((4, 4))
            s[:2, :2] = rotation(phi_a)
            s[2:, 2:] = rotation(phi_b)
            rotated = Purification(
                CovMat(s @ pi.gamma_ab.mat @ s.T),
                s @ pi.gamma_abe,
                pi.gamma_e,
                pi.r_count,
            )
            value = mutual_information_f(
                rotated, homodyne([0.2 + phi_a]), homodyne([1.1 + phi_b]), heterodyne(2)
            )
            assert np.isclose(value, base, atol=1e-10)

    def test_degenerate_joint_ccm_raises(self):
        pi = purify(CovMat(np.eye(4)))
        bad = Purification(pi.gamma_ab, pi.gamma_abe, pi.gamma_e, 0)
        # zero-variance homodyne outcome on the vacuum is fine; force
        # degeneracy through a singular manual CCM instead
        with pytest.raises(NumericalDegeneracyError):
            mutual_information_f(
                Purification(CovMat(np.zeros((4, 4))), np.zeros((4, 0)), np.zeros((0, 0)), 0),
                homodyne([0.0]),
                homodyne([0.0]),
            )


class TestFHomodyne:
    def test_uncorrelated_gives_zero(self):
        assert f_homodyne_ab(StdForm(2.0, 2.0, 0.0, 0.0)) == 0.0

    def test_worked_point(self):
        assert np.isclose(f_homodyne_ab(StdForm(2.0, 2.0, 1.0, 1.0)), 0.5 * np.log(4.0 / 3.0), atol=1e-12)

    def test_symmetric_reduction_matches_g_form(self, rng):
        for _ in range(50):
            a = 1.0 + rng.random() * 2
            kx = 0.95 * rng.random() * (a - 1.0 / a)  # keeps a(a - kx) >= 1
            p = StdForm(a, a, kx, 0.0)
            g = kx / a
            assert np.isclose(f_homodyne_ab(p), -np.log(np.sqrt(1.0 - g * g)), atol=1e-12)


class TestGcmi:
    def test_condition_examples(self):
        assert np.isclose(gcmi_condition_g(StdForm(1.0, 1.0, 0.0, 0.0)), 2.0, atol=1e-14)
        assert np.isclose(gcmi_condition_g(StdForm(2.0, 2.0, 1.0, 1.0)), 2.5 - np.sqrt(3.0), atol=1e-12)

    def test_condition_bound_inside_241(self, rng):
        # sqrt(ab) <= 2.41 forces G >= 2 [1 - sinh(ln sqrt(ab))] >= 0
        count = 0
        while count < 300:
            a = 1.0 + rng.random() * 1.4
            b = 1.0 + rng.random() * 1.4
            if np.sqrt(a * b) > 2.41:
                continue
            kx = rng.random() * np.sqrt(max(a * b - 1, 0)) * 0.95
            try:
                p = StdForm(a, b, kx, rng.uniform(-kx, kx))
            except Exception:
                continue
            count += 1
            g = gcmi_condition_g(p)
            s = np.log(np.sqrt(a * b))
            assert g >= 2.0 * (1.0 - np.sinh(s)) - 1e-12
            assert g >= -1e-12

    def test_u_endpoints(self):
        p = StdForm(2.0, 2.0, 1.0, -1.0)
        assert np.isclose(u_function(p, 0.0, 0.0), (1.0 - 1.0 / 9.0) ** 2, atol=1e-14)
        assert np.isclose(u_function(p, np.inf, np.inf), 0.75, atol=1e-14)

    def test_uncorrelated_gcmi_vanishes(self):
        res = gcmi(StdForm(1.7, 1.2, 0.0, 0.0))
        assert res.value == 0.0

    def test_closed_form_branch_flagged(self):
        res = gcmi(StdForm(2.0, 2.0, 1.0, 0.4))
        assert res.method == "closed_form"
        assert np.isclose(res.value, 0.5 * np.log(4.0 / 3.0), atol=1e-12)

    def test_numeric_equals_closed_form_when_gate_holds(self, rng):
        for _ in range(60):
            a = 1.0 + rng.random() * 1.4
            b = 1.0 + rng.random() * 1.4
            kx = rng.random() * np.sqrt(max(a * b - 1, 0)) * 0.95
            try:
                p = StdForm(a, b, kx, rng.uniform(-kx, kx))
            except Exception:
                continue
            if gcmi_condition_g(p) < 0:
                continue
            numeric = gcmi_numeric(p, points=13)
            assert abs(numeric.value - f_homodyne_ab(p)) < 1e-6


class TestFDecomposed:
    def test_pure_state_has_no_eve_correction(self):
        pi = _pi("pure", a=2.5)
        i_ab, k_eab = f_decomposed(pi, heterodyne(1), heterodyne(1))
        assert k_eab == 0.0
        assert np.isclose(i_ab, mutual_information_f(pi, heterodyne(1), heterodyne(1)), atol=1e-12)

    def test_sq_thermal_homodyne_x_approximation(self):
        # I(A;B) at near-homodyne-x measurements approaches (1/2) ln(a^2/(a^2-k^2))
        pi = _pi("sym_sq_thermal", a=1.2, k=0.5)
        ga = general_single_mode(np.pi / 2, 1.0, 8.0)
        i_ab, _ = f_decomposed(pi, ga, ga, heterodyne(2))
        assert np.isclose(i_ab, 0.5 * np.log(1.44 / 1.19), atol=1e-5)

    def test_identity_on_random_inputs(self, rng):
        for tag, params in (
            ("sym_glems", {"a": 1.6, "kp": 0.6}),
            ("sym_sq_thermal", {"a": 1.25, "k": 0.55}),
            ("asym_glems", {"a": 1.8, "b": 1.3}),
        ):
            pi = _pi(tag, **params)
            for _ in range(30):
                ga = general_single_mode(rng.random() * np.pi, 1.0 + rng.random(), rng.random())
                gb = general_single_mode(rng.random() * np.pi, 1.0 + rng.random(), rng.random())
                if pi.r_count == 1:
                    ge = general_single_mode(rng.random() * np.pi, 1.0 + rng.random(), rng.random())
                else:
                    seed = np.block(
                        [
                            [general_single_mode(rng.random() * np.pi, 1.0 + rng.random(), rng.random()).seed.mat, np.zeros((2, 2))],
                            [np.zeros((2, 2)), general_single_mode(rng.random() * np.pi, 1.0 + rng.random(), rng.random()).seed.mat],
                        ]
                    )
                    ge = FiniteMeasurement(CovMat(seed))
                i_ab, k_eab = f_decomposed(pi, ga, gb, ge)
                total = mutual_information_f(pi, ga, gb, ge)
                assert abs(i_ab + k_eab - total) < 1e-9


class TestCcmRouteAgreement:
    def test_f_matches_assembled_ccm_schur_route(self, rng):
        # independent path: assemble the joint outcome CCM, Schur-complement
        # the E block, and take the determinant ratio directly
        from gielab.measurement import assemble_ccm

        for tag, params in (
            ("sym_glems", {"a": 1.6, "kp": 0.6}),
            ("sym_sq_thermal", {"a": 1.25, "k": 0.55}),
            ("asym_glems", {"a": 1.8, "b": 1.3}),
            ("pure", {"a": 2.1}),
        ):
            pi = _pi(tag, **params)
            for _ in range(20):
                ga = general_single_mode(rng.random() * np.pi, 1.0 + rng.random(), rng.random())
                gb = general_single_mode(rng.random() * np.pi, 1.0 + rng.random(), rng.random())
                ge = heterodyne(pi.r_count) if pi.r_count else None
                ccm = assemble_ccm(pi, ga, gb, ge)
                sigma = ccm.conditional_ab()
                det = np.linalg.det
                f_ccm = 0.5 * np.log(det(sigma[:2, :2]) * det(sigma[2:, 2:]) / det(sigma))
                assert np.isclose(f_ccm, mutual_information_f(pi, ga, gb, ge), atol=1e-10)


class TestDeterminantIdentities:
    def test_sum_formula_two_by_two(self, rng):
        # det(P + Q) = det P + det Q + Tr(P J Q J^T) for symmetric 2x2
        for _ in range(100):
            p = rng.normal(size=(2, 2))
            p = p + p.T
            q = rng.normal(size=(2, 2))
            q = q + q.T
            lhs = np.linalg.det(p + q)
            rhs = np.linalg.det(p) + np.linalg.det(q) + np.trace(p @ J @ q @ J.T)
            assert np.isclose(lhs, rhs, rtol=1e-10, atol=1e-10)

    def test_rank_one_update_four_by_four(self, rng):
        # det(X + c r^T) = (1 + r^T X^{-1} c) det X
        for _ in range(100):
            x = rng.normal(size=(4, 4)) + 2.0 * np.eye(4)
            if abs(np.linalg.det(x)) < 1e-6:
                continue
            c = rng.normal(size=4)
            r = rng.normal(size=4)
            lhs = np.linalg.det(x + np.outer(c, r))
            rhs = (1.0 + r @ np.linalg.inv(x) @ c) * np.linalg.det(x)
            assert np.isclose(lhs, rhs, rtol=1e-10, atol=1e-8)
