import numpy as np
import pytest

from uqm.comparison import (ComparisonConfig, all_different_prob, binom, coherent_compare_prob,
                            compare_avg_success, compare_coefficients, compare_prob_pure,
                            comparison_povm, delta_coefficients, difference_detect_prob,
                            finite_set_comparison_states, gram_matrix, identity_confirmable,
                            permanent, permanent_bruteforce)
from uqm.operators import haar_state, kron, symmetric_projector
from uqm.oracles import comparison_mc_overlap

X = np.linspace(0.0, 1.0, 101)


def test_pure_values():
    assert compare_prob_pure(2, 3, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert compare_prob_pure(1, 1, 0.0) == pytest.approx(0.5)
    # one copy against many: only two terms survive, P -> 1 - x
    np.testing.assert_allclose(compare_prob_pure(1, 2000, X), 1 - X, atol=1e-3)
    # frozen: k = l = 2 at x = 1/2 is 1 - (1 + 4/2 + 1/4)/6
    assert compare_prob_pure(2, 2, 0.5) == pytest.approx(1 - 3.25 / 6, abs=1e-15)


def test_pure_matches_matrix():
    rng = np.random.default_rng(0)
    for d, k, l in [(2, 1, 1), (2, 2, 3), (3, 1, 2), (3, 2, 2)]:
        e = comparison_povm(d, k, l)[1]
        a, b = haar_state(d, rng), haar_state(d, rng)
        v = kron(*([a] * k + [b] * l))
        x = abs(np.vdot(a, b)) ** 2
        assert np.vdot(v, e @ v).real == pytest.approx(compare_prob_pure(k, l, x), abs=1e-12)


def test_average_values():
    for d in (2, 3, 5):
        assert compare_avg_success(ComparisonConfig(d, 1, 1, 0.6)) == pytest.approx(0.6 * (d - 1) / (2 * d))
    assert compare_avg_success(ComparisonConfig(2, 1, 1)) == 0.25
    assert compare_avg_success(ComparisonConfig(3, 400, 400, 0.7)) == pytest.approx(0.7, abs=1e-3)
    # log-gamma branch agrees with the integer branch at the switch
    a = compare_avg_success(ComparisonConfig(4, 30, 30))
    b = compare_avg_success(ComparisonConfig(4, 31, 30))
    assert 0 < a < b < 1


def test_average_vs_overlap_mc():
    rng = np.random.default_rng(1)
    for d in (2, 3):
        for k, l in [(1, 1), (1, 3), (2, 2), (3, 3), (1, 5)]:
            est = comparison_mc_overlap(d, k, l, 100_000, rng, compare_prob_pure)
            assert est.agrees(compare_avg_success(ComparisonConfig(d, k, l)))


def test_povm():
    p = comparison_povm(2, 1, 1)
    v = kron(np.array([1, 0]), np.array([1, 0]))
    assert np.vdot(v, p[1] @ v).real == pytest.approx(0.0)
    w = kron(np.array([1, 0]), np.array([0, 1]))
    assert np.vdot(w, p[1] @ w).real == pytest.approx(0.5)
    np.testing.assert_allclose(p[2], symmetric_projector(2, 2))


def test_properties():
    for k in range(1, 5):
        for l in range(1, 5):
            assert np.all(compare_prob_pure(k + 1, l, X) >= compare_prob_pure(k, l, X) - 1e-15)
            np.testing.assert_array_equal(compare_prob_pure(k, l, X), compare_prob_pure(l, k, X))
            dlt = np.polynomial.polynomial.polyval(X, delta_coefficients(k, l))
            assert abs(dlt[-1]) < 1e-14 and dlt.min() >= -1e-15
    for n in range(2, 11):
        vals = np.array([compare_prob_pure(k, n - k, X) for k in range(1, n)])
        best = vals.max(axis=0)
        np.testing.assert_allclose(vals[n // 2 - 1], best, atol=1e-15)


def test_binom_and_coefficients():
    assert binom(10, 3) == 120
    assert binom(70, 35) == pytest.approx(1.1212e20, rel=1e-3)
    np.testing.assert_allclose(compare_coefficients(2, 2), [1 / 6, 4 / 6, 1 / 6])


def test_coherent_restriction():
    assert coherent_compare_prob(1, 1, 0.25) == pytest.approx(0.5)
    # coherent states: P = 1 - x^{kl/(k+l)} beats the general pure-state value
    for k in range(1, 4):
        assert np.all(coherent_compare_prob(k, k, X) >= compare_prob_pure(k, k, X) - 1e-15)


def test_permanent():
    rng = np.random.default_rng(2)
    for n in range(1, 7):
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        assert permanent(a) == pytest.approx(permanent_bruteforce(a), rel=1e-10)
    with pytest.raises(ValueError):
        permanent(np.eye(11))


def test_difference_and_all_different():
    e = np.eye(3)
    assert difference_detect_prob([e[0]] * 3) == pytest.approx(0.0)
    assert difference_detect_prob([e[0], e[1]]) == pytest.approx(0.5)
    assert difference_detect_prob([e[0], e[1], e[2]]) == pytest.approx(5 / 6)
    assert all_different_prob([e[0], e[1]]) == pytest.approx(0.5)
    assert all_different_prob([e[0], e[1], (e[0] + e[1]) / np.sqrt(2)]) == pytest.approx(0.0, abs=1e-15)
    t = 0.3 + 0.4j
    psi = np.array([t, np.sqrt(1 - abs(t) ** 2), 0])
    assert all_different_prob([e[0], psi]) == pytest.approx((1 - abs(t) ** 2) / 2)
    with pytest.warns(UserWarning):
        assert all_different_prob([np.array([1, 0]), np.array([0, 1]), np.array([1, 1]) / np.sqrt(2)]) == 0
    np.testing.assert_allclose(gram_matrix([e[0], psi]), [[1, t], [np.conj(t), 1]])


def test_identity_confirmable():
    e = np.eye(3)
    assert identity_confirmable([e[0], e[1], (e[0] + e[2]) / np.sqrt(2)])
    assert not identity_confirmable([e[0], e[1], (e[0] + e[1]) / np.sqrt(2)])


def test_finite_set_states():
    e = np.eye(2)
    r1, r2, eta1, eta2 = finite_set_comparison_states(0.5, 0.5, e[0], e[1])
    assert eta1 == pytest.approx(0.5) and eta2 == pytest.approx(0.5)
    assert np.abs(r1 @ r2).max() < 1e-15
    _, _, eta1, eta2 = finite_set_comparison_states(0.3, 0.7, e[0], e[1])
    assert eta1 == pytest.approx(0.58) and eta2 == pytest.approx(0.42)
    # sample the generative model: two independent draws from {phi1, phi2}
    rng = np.random.default_rng(3)
    draws = rng.random((100_000, 2)) < 0.3
    same = np.mean(draws[:, 0] == draws[:, 1])
    assert abs(same - 0.58) < 3 * np.sqrt(0.58 * 0.42 / 100_000)
