import numpy as np
import pytest

from uqm.channels import (ChoiOperator, Ppovm, average_channel, cb_fidelity, cb_fidelity_unitaries,
                          channel_fidelity_bound, choi_of_kraus, choi_of_unitary, comparator_average,
                          comparator_conditional, comparator_ppovm, depolarizing_choi, max_entangled,
                          origin_in_hull, symmetric_test_average, twirl, twirl_choi, twirl_choi_closed,
                          unitary_overlap, unitary_usd, usd_feasible, validate_comparator, validate_ppovm)
from uqm.operators import (antisymmetric_projector, haar_state, haar_unitary, min_eig, proj, swap,
                           symmetric_dim, symmetric_projector)
from uqm.oracles import comparator_mc, diagonal_xi_minimum, twirl_mc
from uqm.usd import idp_success

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
SINGLET = np.array([0, 1, -1, 0]) / np.sqrt(2)


def test_choi_of_unitary():
    w = choi_of_unitary(np.eye(3)).omega
    assert np.trace(w).real == pytest.approx(3)
    np.testing.assert_allclose(w, max_entangled(3))
    # index-loop oracle: omega[(i,a),(j,b)] = U[a,i] conj(U[b,j])
    u = haar_unitary(2, 0)
    loop = np.array([[u[a, i] * np.conj(u[b, j]) for j in range(2) for b in range(2)]
                     for i in range(2) for a in range(2)])
    np.testing.assert_allclose(choi_of_unitary(u).omega, loop, atol=1e-12)
    xw = choi_of_unitary(X).omega
    v = np.array([0, 1, 1, 0])
    np.testing.assert_allclose(xw, np.outer(v, v), atol=1e-15)
    with pytest.raises(ValueError):
        choi_of_unitary(np.diag([1.0, 0.5]))
    np.testing.assert_allclose(choi_of_kraus([u]).omega, choi_of_unitary(u).omega, atol=1e-12)


def test_validate_ppovm():
    xi = np.diag([0.3, 0.7])
    half = 0.5 * np.kron(xi.T, np.eye(2))
    rep = validate_ppovm(Ppovm(2, [half, half], xi))
    assert rep.valid
    np.testing.assert_allclose(rep.xi, xi, atol=1e-12)
    # maximally entangled probe: M_j = F_j / D for a POVM on the doubled space
    f = [proj(v) for v in np.eye(4)]
    assert validate_ppovm(Ppovm(2, [m / 2 for m in f], np.eye(2) / 2)).valid
    bad = [half + 0.6 * proj([1, 0, 0, 0]), half - 0.6 * proj([1, 0, 0, 0])]
    rep = validate_ppovm(Ppovm(2, bad, xi))
    assert not rep.valid and min(rep.min_eigenvalues) < 0
    # probabilities of a valid PPOVM sum to one on any channel
    u = haar_unitary(2, 1)
    p = unitary_usd(u, haar_unitary(2, 2), 0.4).ppovm
    assert validate_ppovm(p).valid
    assert p.probabilities(choi_of_unitary(u)).sum() == pytest.approx(1.0)


def test_usd_feasible():
    a, b = choi_of_unitary(np.eye(2)), choi_of_unitary(X)
    assert usd_feasible(a, b)
    assert not usd_feasible(a, a)
    assert usd_feasible(depolarizing_choi(2, 0.3), a)
    assert not usd_feasible(depolarizing_choi(2, 0.3), depolarizing_choi(2, 0.6))


def test_origin_in_hull():
    assert origin_in_hull([0, np.pi / 2, np.pi])
    assert origin_in_hull([0, 2 * np.pi / 3, 4 * np.pi / 3])
    assert not origin_in_hull([0, 0.5, 1.0])
    rng = np.random.default_rng(0)
    for _ in range(50):
        ph = rng.uniform(0, 2 * np.pi, size=rng.integers(2, 5))
        inside = diagonal_xi_minimum(ph, restarts=5, rng=rng) < 1e-6
        assert origin_in_hull(ph) == inside


def test_cb_fidelity_unitaries():
    u = haar_unitary(3, 3)
    assert cb_fidelity_unitaries(u, u).value == pytest.approx(1.0)
    w = np.diag(np.exp(1j * np.array([0, np.pi / 2, np.pi])))
    cb = cb_fidelity_unitaries(np.eye(3), w)
    assert cb.value == pytest.approx(0.0, abs=1e-12)
    assert unitary_overlap(np.eye(3), w, cb.xi) == pytest.approx(0.0, abs=1e-10)
    # outside the hull: two equal weights give the minimum
    rng = np.random.default_rng(4)
    for _ in range(10):
        ph = rng.uniform(0, 2.5, size=3)
        cb = cb_fidelity_unitaries(np.eye(3), np.diag(np.exp(1j * ph)))
        assert cb.value == pytest.approx(diagonal_xi_minimum(ph, 10, rng), abs=1e-6)
        assert sorted(cb.weights)[-2:] == [0.5, 0.5] or max(cb.weights) == 1.0
        assert unitary_overlap(np.eye(3), np.diag(np.exp(1j * ph)), cb.xi) == pytest.approx(cb.value)


def test_unitary_usd_values():
    assert unitary_usd(np.eye(2), Z, 0.5).probability == pytest.approx(1.0)
    rng = np.random.default_rng(5)
    for _ in range(100):
        u, v = haar_unitary(2, rng), haar_unitary(2, rng)
        f = abs(np.trace(u.conj().T @ v)) / 2
        res = unitary_usd(u, v, 0.5)
        assert res.fidelity == pytest.approx(f, abs=1e-8)
        assert res.probability == pytest.approx(1 - f, abs=1e-8)
    # unequal priors in the projective branch
    th = np.arccos(0.5)
    v = np.diag([np.exp(1j * th), np.exp(-1j * th)])
    res = unitary_usd(np.eye(2), v, 0.9)
    assert res.probability == pytest.approx(0.675, abs=1e-10)
    # branch cross-check: scan pure test states and apply the two-state optimum
    best = 0.0
    for w in np.linspace(0, 1, 201):
        overlap = abs(w * np.exp(1j * th) + (1 - w) * np.exp(-1j * th))
        best = max(best, idp_success(overlap, 0.9))
    assert res.probability == pytest.approx(best, abs=1e-9)


def test_unitary_usd_povm():
    rng = np.random.default_rng(6)
    for d in (2, 3):
        u, v = haar_unitary(d, rng), haar_unitary(d, rng)
        res = unitary_usd(u, v, 0.3)
        assert validate_ppovm(res.ppovm).valid
        pu = res.ppovm.probabilities(choi_of_unitary(u))
        pv = res.ppovm.probabilities(choi_of_unitary(v))
        assert pu[1] == pytest.approx(0, abs=1e-10) and pv[0] == pytest.approx(0, abs=1e-10)
        assert 0.3 * pu[0] + 0.7 * pv[1] == pytest.approx(res.probability, abs=1e-9)
    with pytest.raises(ValueError):
        unitary_usd(np.eye(2), X, 0.5, 0.6)


def test_channel_fidelity_bound_unitaries():
    rng = np.random.default_rng(7)
    u, v = haar_unitary(2, rng), haar_unitary(2, rng)
    fb = channel_fidelity_bound(choi_of_unitary(u), choi_of_unitary(v), 0.5, restarts=4)
    cb = cb_fidelity_unitaries(u, v).value
    assert fb.bound == pytest.approx(1 - cb, abs=1e-6)
    same = channel_fidelity_bound(choi_of_unitary(u), choi_of_unitary(u), 0.5, restarts=2)
    assert same.bound == pytest.approx(0.0, abs=1e-6)


def _amplitude_damping(g):
    return [np.array([[1, 0], [0, np.sqrt(1 - g)]]), np.array([[0, np.sqrt(g)], [0, 0]])]


def _random_strategy_success(o1, o2, eta1, phi):
    """Unambiguous success of a sampled strategy: pure probe plus kernel-projector effects."""
    def out(omega):
        # (I (x) E)[|phi><phi|] from the Choi operator with probe amplitudes A: phi = (A (x) I) Psi+
        a = phi.reshape(2, 2)
        lift = np.kron(a, np.eye(2))
        return lift @ omega @ lift.conj().T
    r1, r2 = out(o1.omega), out(o2.omega)
    def kernel(r):
        w, v = np.linalg.eigh(r)
        k = v[:, w < 1e-10]
        return k @ k.conj().T
    k2, k1 = kernel(r2), kernel(r1)
    best = 0.0
    for a in np.linspace(0, 1, 41):
        for b in np.linspace(0, 1, 41):
            if min_eig(np.eye(4) - a * k2 - b * k1) < -1e-12:
                continue
            best = max(best, eta1 * a * np.trace(k2 @ r1).real + (1 - eta1) * b * np.trace(k1 @ r2).real)
    return best


def test_fidelity_bound_dominates_sampled_strategies():
    rng = np.random.default_rng(8)
    for _ in range(3):
        u = haar_unitary(2, rng)
        o1 = choi_of_kraus(_amplitude_damping(0.3))
        o2 = choi_of_kraus([u @ k for k in _amplitude_damping(0.5)])
        fb = channel_fidelity_bound(o1, o2, 0.5, restarts=4, rng=rng)
        for _ in range(5):
            p = _random_strategy_success(o1, o2, 0.5, haar_state(4, rng))
            assert p <= fb.bound + 1e-5


def test_average_and_twirl():
    x = np.array([[0.2, 0.1j], [-0.1j, 0.8]])
    np.testing.assert_allclose(average_channel(x, 2), np.eye(2) / 2)
    for d in (2, 3):
        np.testing.assert_allclose(twirl(np.eye(d * d), d), np.eye(d * d), atol=1e-12)
        np.testing.assert_allclose(twirl(swap(d), d), swap(d), atol=1e-12)
    rng = np.random.default_rng(9)
    y = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    np.testing.assert_allclose(twirl_mc(y, 2, 100_000, rng), twirl(y, 2), atol=0.03)


@pytest.mark.parametrize("d", [2, 3])
def test_twirl_choi_structure(d):
    # entry-by-entry assembly against the projector form
    np.testing.assert_allclose(twirl_choi(d), twirl_choi_closed(d), atol=1e-10)
    w = twirl_choi(d)
    assert np.trace(w).real == pytest.approx(d * d)
    assert min_eig(w) >= -1e-12


@pytest.mark.parametrize("d", [2, 3])
def test_comparator(d):
    pa = antisymmetric_projector(d, 2)
    rho = pa / np.trace(pa).real
    p = comparator_ppovm(d, rho)
    assert validate_comparator(p, d)
    rng = np.random.default_rng(10 + d)
    u = haar_unitary(d, rng)
    assert comparator_conditional(u, u, rho) == pytest.approx(0.0, abs=1e-12)
    est = comparator_mc(d, rho, 100_000, rng)
    assert est.agrees(comparator_average(d))
    ps = symmetric_projector(d, 2)
    est = comparator_mc(d, ps / symmetric_dim(d, 2), 100_000, rng, symmetric=True)
    assert est.agrees(symmetric_test_average(d))
    with pytest.raises(ValueError):
        comparator_ppovm(d, ps / symmetric_dim(d, 2))


def test_comparator_singlet():
    rho = proj(SINGLET)
    assert comparator_average(2) == 0.75
    assert comparator_conditional(np.eye(2), X, rho) == pytest.approx(1.0)


def test_comparator_rejects_same_outcome():
    d = 2
    pa = antisymmetric_projector(d, 2)
    rho = pa / np.trace(pa).real
    p = comparator_ppovm(d, rho)
    eps = 1e-3 * np.kron(rho.T, symmetric_projector(d, 2))
    bad = Ppovm(p.D, [p.elements[0] - eps, eps, p.elements[1]], rho, ("diff", "same", "?"))
    assert not validate_comparator(bad, d)


def test_comparator_uniqueness_spot_check():
    # moving weight from M_0 into M_diff breaks the no-error condition or positivity of M_0
    d = 2
    pa = antisymmetric_projector(d, 2)
    rho = pa / np.trace(pa).real
    p = comparator_ppovm(d, rho)
    rng = np.random.default_rng(11)
    for _ in range(20):
        h = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
        h = h + h.conj().T
        h -= np.trace(h) / 16 * np.eye(16)
        m_diff, m_0 = p.elements[0] + 1e-3 * h, p.elements[1] - 1e-3 * h
        assert not validate_comparator(Ppovm(4, [m_diff, m_0], rho, ("diff", "?")), d)
