import numpy as np
import pytest

from uqm.optics import (beamsplitter, comparison_network, compare_coherent, compare_coherent_prob,
                        concentrate, detector_curves, dilution_sequence, first_round_outputs,
                        gaussian_integral, known_states_limit, lambda2_constraint,
                        linear_optics_optimum_check, m_refs_network, multi_round_success,
                        noisy_averages, noisy_click_closed, noisy_click_matrix, optimal_split,
                        recovery_f, recovery_round, recovery_round_network, reliability,
                        repeat_same_unknown, resource_exponent, resource_tradeoff,
                        simulate_recovery_round, splitting_strategy, ui_closed, ui_m_refs,
                        ui_m_refs_closed, ui_network, ui_two_refs, ui_two_refs_closed, weak_ui)
from uqm.oracles import coherent_overlap_quadrature, gaussian_integral_mc, noisy_click_mc, phase_keying_mc

A1, A2 = 0.7 + 0.2j, -0.3 + 0.5j
D2 = abs(A1 - A2) ** 2
S13 = np.sqrt(13)


def test_beamsplitter():
    a = 0.4 - 0.3j
    assert beamsplitter(1.0, a, 0.2)[0] == pytest.approx(a)
    out = beamsplitter(0.5, a, a)
    assert out[0] == pytest.approx(np.sqrt(2) * a) and abs(out[1]) < 1e-15
    for t in (-0.1, 1.1):
        with pytest.raises(ValueError):
            beamsplitter(t, 1, 1)


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_concentrate(k):
    a = 0.3 + 0.8j
    expected = np.zeros(k, dtype=complex)
    expected[0] = np.sqrt(k) * a
    np.testing.assert_allclose(concentrate(k, a), expected, atol=1e-14)


def test_networks_unitary():
    nets = [comparison_network(3, 2), ui_network(2, 3, 1, 0.3), m_refs_network(4, 2, 1)]
    assert all(n.is_unitary() for n in nets)


@pytest.mark.parametrize("k,l", [(1, 1), (2, 2), (1, 3), (3, 2)])
def test_compare_coherent(k, l):
    _, p = compare_coherent(k, l, A1, A2)
    assert p == pytest.approx(float(compare_coherent_prob(k, l, D2)), abs=1e-12)
    assert compare_coherent(k, l, A1, A1)[1] == pytest.approx(0.0, abs=1e-14)
    # independent route: the overlap with the equal-states subspace by quadrature
    assert 1 - coherent_overlap_quadrature(k, l, A1, A2) == pytest.approx(p, abs=1e-8)


def test_compare_coherent_examples():
    assert compare_coherent(2, 2, 0, 1)[1] == pytest.approx(1 - np.exp(-1))
    assert compare_coherent(1, 1, 0, 1)[1] == pytest.approx(1 - np.exp(-0.5))


@pytest.mark.parametrize("na,nb,nc,t1", [(1, 1, 1, 0.5), (1, 2, 2, 0.5), (2, 3, 1, 0.3), (3, 1, 2, 0.8)])
def test_ui_two_refs_network_vs_closed(na, nb, nc, t1):
    res = ui_two_refs(na, nb, nc, t1, A1, A1, A2)
    p1, p2, p = ui_two_refs_closed(na, nb, nc, t1, D2)
    assert res.p1 == pytest.approx(float(p1), abs=1e-12)
    assert res.p2 == pytest.approx(float(p2), abs=1e-12)
    assert res.probability == pytest.approx(float(p), abs=1e-12)
    # an unknown equal to reference 1 leaves the D2 mode in vacuum, and symmetrically for D1
    assert abs(res.outputs["A"]) < 1e-14
    assert abs(ui_two_refs(na, nb, nc, t1, A2, A1, A2).outputs["C"]) < 1e-14


def test_ui_two_refs_examples():
    assert ui_two_refs(1, 1, 1, 0.5, A1, A1, A2).probability == pytest.approx(1 - np.exp(-D2 / 3))
    assert ui_two_refs(1, 2, 2, 0.5, A1, A1, A2).probability == pytest.approx(1 - np.exp(-2 * D2 / 5))
    assert float(ui_closed(1, 1, D2)) == pytest.approx(1 - np.exp(-D2 / 3))


def test_no_simultaneous_clicks():
    # with the unknown equal to one reference, the wrong detector never fires
    for au, wrong in ((A1, "D2"), (A2, "D1")):
        res = ui_two_refs(2, 1, 3, 0.4, au, A1, A2)
        assert res.dark[wrong] == pytest.approx(1.0, abs=1e-14)


def test_optimal_split():
    t, p = optimal_split(1, 1, 1, 2.0)
    assert t == pytest.approx(0.5, abs=1e-6)
    assert p == pytest.approx(float(ui_closed(1, 1, 2.0)), abs=1e-12)
    # unequal reference copies move the optimum away from 1/2
    assert abs(optimal_split(1, 1, 3, 2.0)[0] - 0.5) > 1e-3


def test_m_refs():
    # equilateral triangle with unit sides
    tri = np.exp(2j * np.pi * np.arange(3) / 3) / np.sqrt(3)
    _, p = ui_m_refs(3, 1, 1, None, tri)
    assert p == pytest.approx((1 - np.exp(-0.25)) ** 2, abs=1e-12)
    for M, na, nb in [(2, 1, 1), (3, 2, 1), (4, 1, 2)]:
        rng = np.random.default_rng(M)
        r = rng.normal(size=M) + 1j * rng.normal(size=M)
        assert ui_m_refs(M, na, nb, None, r)[1] == pytest.approx(ui_m_refs_closed(M, na, nb, r), abs=1e-12)
    far = 50 * np.exp(2j * np.pi * np.arange(3) / 3)
    assert ui_m_refs(3, 1, 1, None, far)[1] == pytest.approx(1.0)
    # M = 2 reproduces the two-reference identifier
    assert ui_m_refs_closed(2, 1, 1, [A1, A2]) == pytest.approx(float(ui_closed(1, 1, D2)), abs=1e-12)


def test_resource_tradeoff():
    assert resource_tradeoff(4) == 2 and resource_tradeoff(6) == 3
    for N in range(3, 15):
        best = max(range(1, N), key=lambda n: resource_exponent(n, N))
        assert resource_exponent(resource_tradeoff(N), N) == pytest.approx(resource_exponent(best, N))
    with pytest.raises(ValueError):
        resource_tradeoff(2)


def test_known_states_limit():
    assert known_states_limit(1, A1, A2) == pytest.approx(1 - np.exp(-D2 / 2))
    assert known_states_limit(3, A1, A1) == 0
    # the identifier approaches the known-states value as the reference copies grow
    assert float(ui_closed(2, 1e7, D2)) == pytest.approx(known_states_limit(2, A1, A2), abs=1e-6)


def test_weak_ui():
    per, _ = weak_ui(1, A1, A2)
    assert per == pytest.approx(float(ui_closed(1, 1, D2)))
    a2 = np.sqrt(3.0)
    per, overall = weak_ui(3, 0, a2)
    assert per == pytest.approx(1 - np.exp(-1 / 3))
    assert overall == pytest.approx(1 - (1 - per) ** 3)
    # the weak strategy never beats one strong round
    for N in (2, 5, 10):
        assert weak_ui(N, A1, A2)[1] <= ui_closed(1, 1, D2) + 1e-15


def test_repeat_same_unknown():
    r = repeat_same_unknown(A1, A1, A2)
    assert r["network"].is_unitary()
    np.testing.assert_allclose(r["outputs"]["A"], (A1 - A1) / np.sqrt(6), atol=1e-14)
    np.testing.assert_allclose(r["outputs"]["C"], (A2 - A1) / np.sqrt(6), atol=1e-14)
    assert repeat_same_unknown(0, 0, np.sqrt(6))["conditional_probability"] == pytest.approx(1 - np.exp(-1))
    assert repeat_same_unknown(A1, A1, A1)["conditional_probability"] == 0
    out = first_round_outputs(A1, A1, A2)
    assert abs(out["A"]) < 1e-14


def test_recovery_round_constants():
    t1r, t2r, lam2 = recovery_round(1.0)
    assert lam2 == pytest.approx((7 - S13) / 6, abs=1e-12)
    assert t1r == pytest.approx((7 - S13) / 9, abs=1e-12)
    # both maps agree at lambda = 1
    np.testing.assert_allclose(recovery_round_network(1.0), (t1r, t2r, lam2), atol=1e-12)
    with pytest.raises(ValueError):
        recovery_round(0.0)


def test_recovery_network_simulation():
    # propagated network map reproduces sqrt(lambda_next) references for any lambda
    for lam in (1.0, 0.6, 0.2):
        t1r, t2r, nxt = recovery_round_network(lam)
        r = simulate_recovery_round(lam, A1, A2, (t1r, t2r))
        assert r["ref1"] == pytest.approx(np.sqrt(nxt) * A1, abs=1e-12)
        assert r["ref2"] == pytest.approx(np.sqrt(nxt) * A2, abs=1e-12)
    # the printed map departs from the propagated one below lambda = 1
    assert abs(recovery_f(0.5) - recovery_round_network(0.5)[2]) > 1e-3


def test_recovery_small_lambda():
    lam = np.array([1e-2, 1e-3, 1e-4])
    f = recovery_f(lam)
    assert np.all(f < lam) and np.all(np.diff(f) < 0)
    np.testing.assert_allclose((lam - f) / lam**2, 1.0, rtol=0.05)
    seq = dilution_sequence(30)
    assert np.all(np.diff(seq) < 0) and seq[-1] > 0


def test_multi_round():
    p = multi_round_success(2, D2)
    e2 = (7 - S13) / (2 * (10 - S13))
    assert p[1, 0] == pytest.approx((1 - np.exp(-D2 / 3)) * (1 - np.exp(-e2 * D2)), abs=1e-12)
    np.testing.assert_array_equal(multi_round_success(5, 0.0), 0)
    assert p[0, 0] == pytest.approx(float(splitting_strategy(1, D2)))
    with pytest.raises(ValueError):
        multi_round_success(0, 1.0)


def test_splitting_strategy():
    assert float(splitting_strategy(2, 4.0)) == pytest.approx((1 - np.exp(-1)) ** 2)
    # recovery dominates splitting under the closed-form map
    d2 = np.linspace(0, 40, 81)
    for N in (2, 4, 8):
        assert np.all(multi_round_success(N, d2)[-1] >= splitting_strategy(N, d2) - 1e-12)


def test_gaussian_integral():
    x = 0.8 - 0.3j
    assert gaussian_integral(0, 1, 2, 0.4, x) == pytest.approx(np.exp(-0.5 * abs(x) ** 2))
    assert gaussian_integral(3, 1, 2, 0.0, x) == pytest.approx(np.exp(-0.5 * abs(x) ** 2))
    est = gaussian_integral_mc(2, 1, 1, 0.5, 1.0, 1_000_000, np.random.default_rng(0))
    assert est.agrees(gaussian_integral(2, 1, 1, 0.5, 1.0))


def test_noisy_click_matrix():
    m0 = noisy_click_matrix(1, 1, 1, 0.0, A1, A2)
    assert m0[0, 1] == pytest.approx(0, abs=1e-15) and m0[1, 0] == pytest.approx(0, abs=1e-15)
    np.testing.assert_allclose(m0[[0, 1], [0, 1]], ui_two_refs_closed(1, 1, 1, 0.5, D2)[:2], atol=1e-12)
    for sig in (0.1, 0.3):
        np.testing.assert_allclose(noisy_click_matrix(2, 1, 3, sig, A1, A2),
                                   noisy_click_closed(2, 1, 3, sig, D2), atol=1e-12)


def test_noisy_click_mc():
    means, ses = noisy_click_mc(1, 1, 1, 0.25, 0, 1, 400_000, np.random.default_rng(1))
    closed = noisy_click_closed(1, 1, 1, 0.25, 1.0)
    assert np.all(np.abs(means - closed) <= 3 * ses)


def test_reliability():
    assert reliability(1, 1, 0.25, 1.0) == pytest.approx(67 / 70)
    assert reliability(1, 1, 1e-8, 1.0) == pytest.approx(1.0)
    assert reliability(1, 1, 0.25, 1e6) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        reliability(1, 1, 0.25, 0)


def test_noisy_averages():
    p, pe, pf = noisy_averages(1, 1, 0.25, 2.0)
    assert p + pe + pf == pytest.approx(1.0, abs=1e-12)
    assert noisy_averages(1, 1, 0.0, 2.0)[1] == 0
    _, pe, pf = noisy_averages(1, 1, 0.25, 1e8)
    assert pe == pytest.approx(0, abs=1e-12) and pf == pytest.approx(0.125 / 1.125)
    mc = phase_keying_mc(1, 1, 0.25, 2.0, 400_000, np.random.default_rng(2))
    p, pe, pf = noisy_averages(1, 1, 0.25, 2.0)
    for est, val in ((mc.success, p), (mc.error, pe), (mc.failure, pf)):
        assert est.agrees(val)


def test_detector_curves():
    p1, p2 = detector_curves(0.5, 1.0, D2)
    assert p1 == pytest.approx(1 - np.exp(-D2 / 3)) and p2 == pytest.approx(1 - np.exp(-D2 / 3))
    assert detector_curves(0.5, 0.0, D2) == (0, 0)
    # finite efficiency matches the network with lossy detectors
    net = ui_network(1, 1, 1, 0.5, efficiency=0.53)
    inp = {"A": 0.0, "B": 0.0, "C": np.sqrt(2.0), "D": 0.0}
    click = 1 - net.detector_dark(inp)["D1"]
    assert click == pytest.approx(float(detector_curves(0.5, 0.53, 2.0)[0]), abs=1e-12)
    with pytest.raises(ValueError):
        detector_curves(0.5, 1.2, 1.0)


def test_linear_optics_optimum():
    l1, l2, p = linear_optics_optimum_check(1, 1, 1.3)
    assert l1 == pytest.approx(1 / 3, abs=1e-6) and l2 == pytest.approx(1 / 3, abs=1e-6)
    assert p == pytest.approx(float(ui_closed(1, 1, 1.3**2)), abs=1e-10)
    l1, l2, _ = linear_optics_optimum_check(2, 3, 1.0)
    assert l1 == pytest.approx(0.75, abs=1e-6) and l2 == pytest.approx(0.75, abs=1e-6)
    # dense scan agrees with the bounded optimizer
    grid = np.linspace(0, 1.2, 120001)
    vals = 0.5 * (2 - np.exp(-grid) - np.exp(-lambda2_constraint(2, 3, grid)))
    assert grid[np.argmax(vals)] == pytest.approx(0.75, abs=1e-4)
