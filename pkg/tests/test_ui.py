import numpy as np
import pytest
from scipy.optimize import minimize

from uqm.operators import antisymmetric_projector, haar_state, kron, proj, symmetric_projector, validate_povm
from uqm.oracles import bergou_hillery_search, haar_states, ui_mc
from uqm.ui import (PositivityError, UiConfig, bergou_hillery, bergou_hillery_coefficients,
                    equatorial_average_states, equatorial_state, equatorial_zero_vectors,
                    hayashi_optimal, hayashi_prob, swap_based, swap_based_prob, swap_block_eigenvalues,
                    swap_block_matrices, swap_min_eigenvalue, ui_average_states, zhang_ying)


def test_average_states_qubits():
    rho1, rho2 = ui_average_states(UiConfig(2, 1, (1, 1), 2))
    expected = np.kron(symmetric_projector(2, 2) / 3, np.eye(2) / 2)
    np.testing.assert_allclose(rho1, expected, atol=1e-12)
    assert np.trace(rho2).real == pytest.approx(1.0)


def test_average_states_mc():
    rng = np.random.default_rng(0)
    n = 100_000
    a, b = haar_states(2, n, rng), haar_states(2, n, rng)
    v = np.einsum("na,nb,nc->nabc", a, a, b).reshape(n, 8)
    mc = np.einsum("ni,nj->ij", v, v.conj()) / n
    rho1, _ = ui_average_states(UiConfig(2, 1, (1, 1), 2))
    assert np.abs(mc - rho1).max() < 5e-3


def test_config_validation():
    with pytest.raises(ValueError):
        UiConfig(2, 1, (1,), 2)
    with pytest.raises(ValueError):
        UiConfig(2, 1, (1, 1), 2, (0.3, 0.3))


@pytest.mark.parametrize("eta1,mean,regime", [
    (0.5, 1 / 6, "povm"), (0.1, 0.225, "left-projective"), (0.9, 0.225, "right-projective"),
])
def test_bergou_hillery(eta1, mean, regime):
    m = bergou_hillery(eta1)
    assert m.info["mean"] == pytest.approx(mean, abs=1e-12)
    assert m.info["regime"] == regime
    assert validate_povm(m.povm).valid
    assert bergou_hillery_search(eta1)[2] == pytest.approx(mean, abs=1e-7)


def test_bergou_hillery_half_is_two_thirds():
    a, b, _ = bergou_hillery_coefficients(0.5)
    assert a == pytest.approx(2 / 3) and b == pytest.approx(2 / 3)


def test_swap_based():
    m = swap_based(3, 0.5, 0.5)
    assert validate_povm(m.povm).valid
    rng = np.random.default_rng(1)
    r = [haar_state(3, rng) for _ in range(2)]
    x = abs(np.vdot(*r)) ** 2
    assert m.identification_prob(r) == pytest.approx(swap_based_prob(0.5, 0.5, x), abs=1e-12)
    with pytest.raises(PositivityError) as err:
        swap_based(3, 0.6, 0.6)
    assert err.value.eigenvalue == pytest.approx(-0.2)
    assert validate_povm(swap_based(3, 1.0, 0.0).povm).valid


def test_swap_blocks():
    for c1, c2 in [(0.3, 0.4), (0.5, 0.5), (1.0, 0.0), (0.9, 0.3)]:
        q3, q6 = swap_block_matrices(c1, c2)
        ev = swap_block_eigenvalues(c1, c2)
        np.testing.assert_allclose(np.linalg.eigvalsh(q3), ev[3], atol=1e-12)
        np.testing.assert_allclose(np.linalg.eigvalsh(q6), ev[6], atol=1e-12)
    assert swap_min_eigenvalue(3, 0.6, 0.6) == pytest.approx(-0.2)


def test_swap_based_qubit_boundary():
    # without the six-dimensional block the qubit boundary lies beyond c1 + c2 = 1
    assert swap_min_eigenvalue(2, 0.6, 0.6) > 0
    assert validate_povm(swap_based(2, 0.6, 0.6).povm).valid


def test_hayashi():
    for d, mean in ((2, 1 / 6), (3, 2 / 9)):
        m = hayashi_optimal(d)
        assert validate_povm(m.povm).valid
        assert m.info["mean"] == pytest.approx(mean)
    rng = np.random.default_rng(2)
    m = hayashi_optimal(3)
    r = [haar_state(3, rng) for _ in range(2)]
    x = abs(np.vdot(*r)) ** 2
    assert m.identification_prob(r) == pytest.approx(hayashi_prob(x), abs=1e-12)
    est = ui_mc(hayashi_optimal(2), 50_000, rng)
    assert est.agrees(1 / 6)


def test_ordering_sb_opt():
    x = np.linspace(0, 1, 201)
    assert np.all(swap_based_prob(0.5, 0.5, x) <= hayashi_prob(x) + 1e-15)


@pytest.mark.parametrize("d", [2, 3])
def test_zhang_ying(d):
    m = zhang_ying(d)
    assert validate_povm(m.povm).valid
    rng = np.random.default_rng(3)
    for _ in range(20):
        refs = [haar_state(d, rng) for _ in range(d)]
        assert m.no_error_residual(refs) <= 1e-9
    with pytest.raises(ValueError):
        zhang_ying(3, M=2)


def test_no_error_conditions_random():
    rng = np.random.default_rng(4)
    ms = [bergou_hillery(0.3), hayashi_optimal(2), hayashi_optimal(3), swap_based(3, 0.4, 0.6)]
    for m in ms:
        for _ in range(100):
            assert m.no_error_residual([haar_state(m.d, rng) for _ in range(2)]) <= 1e-9


def test_integrated_no_error_implies_pointwise():
    # Tr(E_1 rho_2) = 0 for the averaged state forces zero clicks on each sampled signal
    m = bergou_hillery(0.5)
    _, rho2 = ui_average_states(UiConfig(2, 1, (1, 1), 2))
    assert abs(np.trace(m.povm[0] @ rho2)) < 1e-12
    rng = np.random.default_rng(5)
    for _ in range(50):
        a, b = haar_state(2, rng), haar_state(2, rng)
        sig = kron(b, a, b)
        assert abs(np.vdot(sig, m.povm[0] @ sig)) < 1e-12


def test_equatorial_zero_vectors():
    rho1, rho2 = equatorial_average_states()
    a, b = equatorial_zero_vectors()
    for v in a:
        assert abs(np.vdot(v, rho2 @ v)) < 1e-12
    for v in b:
        assert abs(np.vdot(v, rho1 @ v)) < 1e-12
    # averaged states match an equatorial quadrature
    phis = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    acc = 0
    for p1 in phis:
        for p2 in phis:
            s1, s2 = equatorial_state(p1), equatorial_state(p2)
            acc = acc + proj(kron(s1, s1, s2))
    np.testing.assert_allclose(acc / len(phis) ** 2, rho1, atol=1e-12)


def _herm(x):
    return np.array([[x[0], x[1] + 1j * x[2]], [x[1] - 1j * x[2], x[3]]])


@pytest.mark.parametrize("eta1", [0.5, 0.3, 0.1])
def test_equatorial_optimum_matches_qubit_optimum(eta1):
    rho1, rho2 = equatorial_average_states()
    a, b = equatorial_zero_vectors()
    A, B = np.stack(a, axis=1), np.stack(b, axis=1)

    def effects(x):
        return A @ _herm(x[:4]) @ A.conj().T, B @ _herm(x[4:]) @ B.conj().T

    def neg(x):
        e1, e2 = effects(x)
        return -(eta1 * np.trace(e1 @ rho1).real + (1 - eta1) * np.trace(e2 @ rho2).real)

    def cons(x):
        # every eigenvalue, not just the smallest, keeps the constraint smooth at degenerate optima
        e1, e2 = effects(x)
        return np.concatenate([np.linalg.eigvalsh(np.eye(8) - e1 - e2),
                               np.linalg.eigvalsh(_herm(x[:4])), np.linalg.eigvalsh(_herm(x[4:]))])

    res = minimize(neg, [0.5, 0.05, 0.02, 0.5, 0.5, 0.03, 0.01, 0.5], method="SLSQP",
                   constraints=[{"type": "ineq", "fun": cons}], options={"ftol": 1e-16, "maxiter": 2000})
    e1, e2 = effects(res.x)
    lam, mu, _ = bergou_hillery_coefficients(eta1)
    np.testing.assert_allclose(e1, lam * antisymmetric_projector(2, 2, [0, 2], 3), atol=1e-6)
    np.testing.assert_allclose(e2, mu * antisymmetric_projector(2, 2, [0, 1], 3), atol=1e-6)
