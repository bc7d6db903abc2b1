"""Acceptance checks, grouped into suites. Each check compares two independent routes."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import channels as ch
from . import comparison as cmp
from . import measurements as ms
from . import optics as opt
from . import oracles as orc
from . import ui
from .operators import antisymmetric_projector, haar_state, haar_unitary, kron, validate_povm
from .usd import idp_optimal, idp_regime


@dataclass(frozen=True)
class Check:
    criterion: int
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} [{self.criterion}] {self.name}" + (f": {self.detail}" if self.detail else "")


def _rng(seed: int, criterion: int) -> np.random.Generator:
    return np.random.default_rng([seed, criterion])


def _pair_with_overlap(lam: float, rng) -> tuple[np.ndarray, np.ndarray]:
    ph = np.exp(1j * rng.uniform(0, 2 * np.pi))
    return np.array([1.0, 0.0], complex), np.array([lam * ph, np.sqrt(1 - lam**2)], complex)


def _antisym_state(d: int) -> np.ndarray:
    pa = antisymmetric_projector(d, 2)
    return pa / np.trace(pa).real


# ---------------------------------------------------------------- 1

def criterion_1(seed: int) -> list[Check]:
    rng = _rng(seed, 1)
    worst_bf = worst_mid = worst_povm = 0.0
    n_mid = 0
    for _ in range(100):
        lam, eta1 = rng.uniform(0.0, 0.99), rng.uniform(0.01, 0.99)
        psi1, psi2 = _pair_with_overlap(lam, rng)
        sol = idp_optimal(psi1, psi2, eta1)
        e1, e2 = sol.povm.effects[0], sol.povm.effects[1]
        achieved = eta1 * np.vdot(psi1, e1 @ psi1).real + (1 - eta1) * np.vdot(psi2, e2 @ psi2).real
        worst_povm = max(worst_povm, abs(achieved - sol.p_discrimination))
        worst_bf = max(worst_bf, abs(sol.p_discrimination - orc.brute_force_idp(lam, eta1)))
        if idp_regime(lam, eta1) == "povm":
            n_mid += 1
            exact = 1 - 2 * np.sqrt(eta1 * (1 - eta1)) * lam
            worst_mid = max(worst_mid, abs(sol.p_discrimination - exact))
    return [
        Check(1, "idp_vs_bruteforce", worst_bf <= 1e-6, f"max dev {worst_bf:.2e}"),
        Check(1, "idp_povm_attains_value", worst_povm <= 1e-12, f"max dev {worst_povm:.2e}"),
        Check(1, "idp_middle_regime_exact", worst_mid <= 1e-12 and n_mid > 0,
              f"{n_mid} cases, max dev {worst_mid:.2e}"),
    ]


# ---------------------------------------------------------------- 2

def _configs(max_total: int = 6):
    return [(d, k, l) for d in (2, 3) for k in range(1, max_total) for l in range(1, max_total + 1 - k)]


def criterion_2(seed: int, mc_samples: int = 100_000) -> list[Check]:
    rng = _rng(seed, 2)
    worst = 0.0
    for d, k, l in _configs():
        e_diff = cmp.comparison_povm(d, k, l).effects[1]
        for _ in range(3):
            a, b = haar_state(d, rng), haar_state(d, rng)
            v = kron(*([a] * k + [b] * l))
            explicit = np.vdot(v, e_diff @ v).real
            x = abs(np.vdot(a, b)) ** 2
            worst = max(worst, abs(explicit - cmp.compare_prob_pure(k, l, x)))
    bad = []
    for d, k, l in _configs():
        est = orc.comparison_mc(d, k, l, mc_samples, rng)
        exact = cmp.compare_avg_success(cmp.ComparisonConfig(d, k, l))
        if not est.agrees(exact):
            bad.append(f"d={d} k={k} l={l}: {est.mean:.5f}±{est.se:.1e} vs {exact:.5f}")
    etas = (0.1, 0.37, 0.5, 1.0)
    quarter = max(abs(cmp.compare_avg_success(cmp.ComparisonConfig(2, 1, 1, e)) - e / 4) for e in etas)
    return [
        Check(2, "pure_formula_vs_matrix", worst <= 1e-10, f"max dev {worst:.2e}"),
        Check(2, "haar_average_vs_mc", not bad, "; ".join(bad) or f"{len(_configs())} configs within 3 SE"),
        Check(2, "qubit_single_copy_quarter", quarter <= 1e-15, f"max dev {quarter:.1e}"),
    ]


# ---------------------------------------------------------------- 3

def criterion_3(seed: int) -> list[Check]:
    rng = _rng(seed, 3)
    worst_net = worst_quad = 0.0
    for k in range(1, 5):
        for l in range(1, 5):
            a1, a2 = rng.normal(size=2) + 1j * rng.normal(size=2)
            closed = 1 - np.exp(-k * l / (k + l) * abs(a1 - a2) ** 2)
            _, p = opt.compare_coherent(k, l, a1, a2)
            worst_net = max(worst_net, abs(p - closed))
            quad = 1 - orc.coherent_overlap_quadrature(k, l, a1, a2)
            worst_quad = max(worst_quad, abs(quad - closed))
    return [
        Check(3, "coherent_compare_network", worst_net <= 1e-12, f"max dev {worst_net:.2e}"),
        Check(3, "coherent_compare_quadrature", worst_quad <= 1e-8, f"max dev {worst_quad:.2e}"),
    ]


# ---------------------------------------------------------------- 4

def criterion_4(seed: int) -> list[Check]:
    rng = _rng(seed, 4)
    worst_113 = worst_127 = 0.0
    for _ in range(50):
        a1, a2 = rng.normal(size=2) + 1j * rng.normal(size=2)
        d2 = abs(a1 - a2) ** 2
        res = opt.ui_two_refs(1, 1, 1, 0.5, a1, a1, a2)
        worst_113 = max(worst_113, abs(res.probability - (1 - np.exp(-d2 / 3))))
        n_a, n_b = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        res = opt.ui_two_refs(n_a, n_b, n_b, 0.5, a1, a1, a2)
        worst_127 = max(worst_127, abs(res.probability - opt.ui_closed(n_a, n_b, d2)))
    worst_lim = 0.0
    for n_a in (1, 2, 3):
        for a1, a2 in ((1.0, -1.0), (0.3 + 0.2j, -0.5j), (1.5, 0.5)):
            lim = opt.known_states_limit(n_a, a1, a2)
            worst_lim = max(worst_lim, abs(opt.ui_closed(n_a, 1e6, abs(a1 - a2) ** 2) - lim))
    delta = np.linspace(0.0, 5.0, 300)
    x = np.exp(-delta**2)
    p_sb = ui.swap_based_prob(0.5, 0.5, x)
    p_opt = ui.hayashi_prob(x)
    p_bs = opt.ui_closed(1, 1, delta**2)
    ordered = bool(np.all(p_sb <= p_opt + 1e-15) and np.all(p_opt <= p_bs + 1e-15))
    return [
        Check(4, "single_copy_ui_network", worst_113 <= 1e-12, f"max dev {worst_113:.2e}"),
        Check(4, "multi_copy_ui_network", worst_127 <= 1e-12, f"max dev {worst_127:.2e}"),
        Check(4, "known_states_limit", worst_lim <= 1e-5, f"max dev {worst_lim:.2e}"),
        Check(4, "strategy_ordering", ordered, "300-point grid"),
    ]


# ---------------------------------------------------------------- 5

def criterion_5(seed: int, mc_samples: int = 100_000) -> list[Check]:
    rng = _rng(seed, 5)
    expected = {0.05: 0.95 / 4, 0.1: 0.9 / 4, 0.15: 0.85 / 4, 0.5: 1 / 6,
                0.85: 0.85 / 4, 0.9: 0.9 / 4, 0.95: 0.95 / 4}
    worst_bh = worst_search = 0.0
    for eta, val in expected.items():
        worst_bh = max(worst_bh, abs(ui.bergou_hillery(eta).info["mean"] - val))
        worst_search = max(worst_search, abs(orc.bergou_hillery_search(eta)[2] - val))
    hay = []
    for d in (2, 3):
        est = orc.ui_mc(ui.hayashi_optimal(d), mc_samples, rng)
        exact = (d - 1) / (3 * d)
        hay.append((d, est.mean, abs(est.mean - exact) / exact))
    worst_block = 0.0
    boundary_ok = True
    for d in (3, 4):
        for c1 in (0.0, 0.2, 0.5, 0.8, 1.0):
            for c2 in (1 - c1, 1 - c1 + 0.05, 1 - c1 - 0.05):
                if c2 < 0:
                    continue
                e0 = ui.swap_based_effects(d, c1, c2)[2]
                dense = np.linalg.eigvalsh(e0)
                block = ui.swap_block_eigenvalues(c1, c2)
                closed = np.unique(np.round(np.concatenate([block[1], block[3], block[6]]), 9))
                worst_block = max(worst_block, abs(dense.min() - ui.swap_min_eigenvalue(d, c1, c2)),
                                  np.abs(np.unique(np.round(dense, 9)) - closed).max()
                                  if len(np.unique(np.round(dense, 9))) == len(closed) else np.inf)
                positive = dense.min() >= -1e-10
                boundary_ok &= positive == (c1 + c2 <= 1 + 1e-12)
    return [
        Check(5, "bergou_hillery_means", worst_bh <= 1e-12, f"max dev {worst_bh:.2e}"),
        Check(5, "bergou_hillery_vs_search", worst_search <= 1e-6, f"max dev {worst_search:.2e}"),
        Check(5, "hayashi_haar_average", all(r <= 0.01 for _, _, r in hay),
              ", ".join(f"d={d}: {m:.5f} (rel {r:.1e})" for d, m, r in hay)),
        Check(5, "swap_positivity_boundary", bool(boundary_ok), "c1 + c2 = 1 for d = 3, 4"),
        Check(5, "swap_block_eigenvalues", worst_block <= 1e-10, f"max dev {worst_block:.2e}"),
    ]


# ---------------------------------------------------------------- 6

def criterion_6(seed: int) -> list[Check]:
    r13 = np.sqrt(13.0)
    lam2 = opt.recovery_f(1.0)
    t1r = opt.recovery_transmittivities(1.0)[0]
    consts = max(abs(lam2 - (7 - r13) / 6), abs(t1r - (7 - r13) / 9))
    # the recovery beamsplitters restore both references at the first round
    rng = _rng(seed, 6)
    a1, a2 = rng.normal(size=2) + 1j * rng.normal(size=2)
    rec = opt.simulate_recovery_round(1.0, a1, a2)
    net = max(abs(rec["ref1"] - np.sqrt(lam2) * a1), abs(rec["ref2"] - np.sqrt(lam2) * a2))
    lam = opt.dilution_sequence(101)
    monotone = bool(np.all(np.diff(lam) < 0) and np.all(lam > 0))
    d2 = np.linspace(0.0, 30.0, 301)
    p2 = opt.multi_round_success(2, d2)[1]
    eq148 = (1 - np.exp(-d2 / 3)) * (1 - np.exp(-(7 - r13) / (2 * (10 - r13)) * d2))
    dev148 = float(np.abs(p2 - eq148).max())
    p = opt.multi_round_success(10, np.linspace(0.0, 20.0, 401) ** 2)
    margins = [float((p[n - 1] - opt.splitting_strategy(n, np.linspace(0.0, 20.0, 401) ** 2)).min())
               for n in range(1, 11)]
    return [
        Check(6, "recovery_constants", consts <= 1e-12, f"max dev {consts:.2e}"),
        Check(6, "recovery_network_first_round", net <= 1e-12, f"max dev {net:.2e}"),
        Check(6, "dilution_decreasing_positive", monotone, f"lambda_100 = {lam[100]:.4e}"),
        Check(6, "second_round_probability", dev148 <= 1e-12, f"max dev {dev148:.2e}"),
        Check(6, "recovery_beats_splitting", min(margins) >= -1e-12, f"min margin {min(margins):.2e}"),
    ]


# ---------------------------------------------------------------- 7

NOISE_CONFIGS = ((1, 1, 1), (2, 1, 3), (3, 2, 2))


def criterion_7(seed: int, mc_samples: int = 1_000_000) -> list[Check]:
    rng = _rng(seed, 7)
    sigma = 0.25
    bad = []
    for xi in (0.5, 1.0, 2.0):
        for n_a, n_b, n_c in NOISE_CONFIGS:
            a1, a2 = xi, -xi * np.exp(0.3j)
            means, ses = orc.noisy_click_mc(n_a, n_b, n_c, sigma, a1, a2, mc_samples, rng)
            closed = opt.noisy_click_matrix(n_a, n_b, n_c, sigma, a1, a2)
            z = np.abs(means - closed) / ses
            if z.max() > 3:
                bad.append(f"matrix xi={xi} n={n_a}{n_b}{n_c}: z={z.max():.2f}")
        for n_a, n_b in ((1, 1), (2, 3)):
            est = orc.phase_keying_mc(n_a, n_b, sigma, xi, mc_samples, rng)
            r = opt.reliability(n_a, n_b, sigma, xi)
            p, pe, pf = opt.noisy_averages(n_a, n_b, sigma, xi)
            for name, m, se, val in (("R", est.reliability, est.reliability_se, r),
                                     ("P", est.success.mean, est.success.se, p),
                                     ("PE", est.error.mean, est.error.se, pe),
                                     ("PF", est.failure.mean, est.failure.se, pf)):
                if abs(m - val) > 3 * se:
                    bad.append(f"{name} xi={xi} n={n_a}{n_b}: z={abs(m - val) / se:.2f}")
    sums = max(abs(sum(opt.noisy_averages(n_a, n_b, s, xi)) - 1)
               for n_a in (1, 2, 3) for n_b in (1, 2, 3) for s in (0.0, 0.1, 0.25, 1.0)
               for xi in (0.1, 0.5, 1.0, 2.0, 10.0))
    limits = max(max(abs(opt.reliability(n, n, 0.0, xi) - 1), abs(opt.noisy_averages(n, n, 0.0, xi)[1]))
                 for n in (1, 2, 3) for xi in (0.1, 1.0, 5.0))
    return [
        Check(7, "noise_vs_mc", not bad, "; ".join(bad) or "all entries within 3 SE"),
        Check(7, "noisy_averages_sum", sums <= 1e-12, f"max dev {sums:.1e}"),
        Check(7, "noiseless_limit", limits <= 1e-15, f"max dev {limits:.1e}"),
    ]


# ---------------------------------------------------------------- 8

def criterion_8(seed: int, mc_samples: int = 100_000) -> list[Check]:
    rng = _rng(seed, 8)
    us, vs = orc.haar_unitaries(2, 1000, rng), orc.haar_unitaries(2, 1000, rng)
    worst_q = max(abs(ch.cb_fidelity_unitaries(u, v).value - 0.5 * abs(np.trace(u.conj().T @ v)))
                  for u, v in zip(us, vs))
    worst_3 = 0.0
    for _ in range(30):
        u, v = haar_unitary(3, rng), haar_unitary(3, rng)
        cb = ch.cb_fidelity_unitaries(u, v)
        worst_3 = max(worst_3, abs(cb.value - orc.diagonal_xi_minimum(cb.phases, rng=rng)))
    singlet = _antisym_state(2)
    no_err = max(ch.comparator_conditional(u, u, singlet) for u in orc.haar_unitaries(2, 1000, rng))
    avg = []
    for d in (2, 3):
        est = orc.comparator_mc(d, _antisym_state(d), mc_samples, rng)
        exact = ch.comparator_average(d)
        avg.append((d, est.mean, abs(est.mean - exact) / exact))
    tw_closed = float(np.abs(ch.twirl_choi(2) - ch.twirl_choi_closed(2)).max()
                      + np.abs(ch.twirl_choi(3) - ch.twirl_choi_closed(3)).max())
    y = np.zeros((9, 9), complex)
    y[1, 5] = 1.0
    y = y + y.conj().T + np.diag(np.arange(9.0))
    tw_mc = float(np.abs(orc.twirl_mc(y, 3, mc_samples, rng) - ch.twirl(y, 3)).max())
    return [
        Check(8, "qubit_fidelity_trace_formula", worst_q <= 1e-12, f"max dev {worst_q:.2e}"),
        Check(8, "qutrit_fidelity_vs_minimization", worst_3 <= 1e-6, f"max dev {worst_3:.2e}"),
        Check(8, "comparator_no_error", no_err <= 1e-12, f"max p_diff {no_err:.2e}"),
        Check(8, "comparator_haar_average", all(r <= 0.01 for _, _, r in avg),
              ", ".join(f"d={d}: {m:.5f} (rel {r:.1e})" for d, m, r in avg)),
        Check(8, "twirl_choi_closed_form", tw_closed <= 1e-12, f"max dev {tw_closed:.1e}"),
        Check(8, "twirl_vs_mc", tw_mc <= 0.02, f"max entry dev {tw_mc:.2e} at {mc_samples} samples"),
    ]


# ---------------------------------------------------------------- 9

def criterion_9(seed: int, mc_samples: int = 100_000) -> list[Check]:
    rng = _rng(seed, 9)
    lab = []
    for d in (2, 3, 4):
        est = orc.labeled_mc(d, _antisym_state(d), mc_samples, rng)
        lab.append((d, est.mean, abs(est.mean - 1 / d) * d))
    worst_t = 0.0
    for th in np.linspace(0.0, np.pi, 61):
        rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
        worst_t = max(worst_t, abs(ms.unlabeled_success(np.eye(2), rot) - ms.unlabeled_success_closed(th)))
    est = orc.unlabeled_mc(ms.unlabeled_test_state(), mc_samples, rng)
    rel = abs(est.mean - 4 / 9) / (4 / 9)
    dd = abs(ms.diffdiff_strategy()[1] - 1 / 9)
    audit = ms.appendix_e_audit()
    return [
        Check(9, "labeled_haar_average", all(r <= 0.01 for _, _, r in lab),
              ", ".join(f"d={d}: {m:.5f} (rel {r:.1e})" for d, m, r in lab)),
        Check(9, "unlabeled_theta_grid", worst_t <= 1e-10, f"max dev {worst_t:.2e}"),
        Check(9, "unlabeled_haar_average", rel <= 0.01, f"{est.mean:.5f} (rel {rel:.1e})"),
        Check(9, "diffdiff_value", dd <= 1e-15, f"dev {dd:.1e}"),
        Check(9, "subspace_audit", audit.passed,
              ", ".join(k for k, v in audit.checks.items() if not v) or f"{len(audit.checks)} checks"),
    ]


# ---------------------------------------------------------------- 10

def _ui_refs(d: int, m: int, rng) -> list[np.ndarray]:
    return [haar_state(d, rng) for _ in range(m)]


def criterion_10(seed: int, instances: int = 100) -> list[Check]:
    rng = _rng(seed, 10)
    valid = {}
    residual = {}

    def note(name, ok, res=None):
        valid[name] = valid.get(name, True) and bool(ok)
        if res is not None:
            residual[name] = max(residual.get(name, 0.0), float(res))

    for _ in range(instances):
        lam, eta1 = rng.uniform(0, 0.99), rng.uniform(0.01, 0.99)
        psi1, psi2 = _pair_with_overlap(lam, rng)
        sol = idp_optimal(psi1, psi2, eta1)
        e1, e2 = sol.povm.effects[:2]
        note("idp", validate_povm(sol.povm).valid,
             max(abs(np.vdot(psi2, e1 @ psi2)), abs(np.vdot(psi1, e2 @ psi1))))
    for d, k, l in _configs(4):
        povm = cmp.comparison_povm(d, k, l)
        res = 0.0
        for _ in range(3):
            a = haar_state(d, rng)
            v = kron(*([a] * (k + l)))
            res = max(res, abs(np.vdot(v, povm.effects[1] @ v)))
        note("comparison", validate_povm(povm).valid, res)
    measurements = {"bergou_hillery": ui.bergou_hillery(0.5), "hayashi_d2": ui.hayashi_optimal(2),
                    "hayashi_d3": ui.hayashi_optimal(3), "swap_based_d3": ui.swap_based(3, 0.5, 0.5),
                    "zhang_ying_d2": ui.zhang_ying(2), "zhang_ying_d3": ui.zhang_ying(3)}
    for name, m in measurements.items():
        note(name, validate_povm(m.povm).valid)
        for _ in range(instances):
            note(name, True, m.no_error_residual(_ui_refs(m.d, m.M, rng)))
    singlet = _antisym_state(2)
    comp = ch.comparator_ppovm(2, singlet)
    note("comparator", ch.validate_comparator(comp, 2))
    for _ in range(instances):
        u, v = haar_unitary(2, rng), haar_unitary(2, rng)
        res = ch.unitary_usd(u, v, rng.uniform(0.05, 0.95))
        note("unitary_usd", validate_povm(res.povm).valid and ch.validate_ppovm(res.ppovm).valid)
        pu = res.ppovm.probabilities(ch.choi_of_unitary(u))
        pv = res.ppovm.probabilities(ch.choi_of_unitary(v))
        note("unitary_usd", True, max(abs(pu[1]), abs(pv[0])))
        w = haar_unitary(2, rng)
        note("comparator", True, comp.probabilities(ch.choi_of_unitary(np.kron(w, w)))[0])
        obs = ms.SharpObservable.from_unitary(w)
        note("labeled", True, ms.labeled_compare(2).q_same(obs, obs))
        sd, ds = ms.unlabeled_pair_operators(w, w)
        phi = ms.unlabeled_test_state()
        note("unlabeled", True, abs(phi.conj() @ (sd + ds) @ phi))
        a1, a2 = rng.normal(size=2) + 1j * rng.normal(size=2)
        out = opt.ui_two_refs(1, 1, 1, 0.5, a1, a1, a2).outputs
        note("coherent_ui", True, min(abs(out["C"]), abs(out["A"])) ** 2)
    note("outcome_classes", ms.build_outcome_operators(2).check())
    from .cli import render_csv
    from .figures import FIGURES, build_figure
    deterministic = all(render_csv(build_figure(f)) == render_csv(build_figure(f)) for f in FIGURES)
    bad_valid = [k for k, v in valid.items() if not v]
    worst = max(residual.values())
    return [
        Check(10, "constructions_validate", not bad_valid, ", ".join(bad_valid) or f"{len(valid)} constructions"),
        Check(10, "no_error_residuals", worst <= 1e-9,
              f"max {worst:.1e} over {len(residual)} constructions"),
        Check(10, "figures_deterministic", deterministic, f"{len(FIGURES)} figures"),
    ]


CRITERIA: dict[int, Callable[[int], list[Check]]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
}

SUITES: dict[str, tuple[int, ...]] = {
    "usd": (1,), "comparison": (2,), "optics": (3, 4, 6, 7), "ui": (5,),
    "channels": (8,), "meas": (9,), "properties": (10,), "all": tuple(range(1, 11)),
}


def run_suite(name: str, seed: int = 42, echo: Callable[[str], None] | None = None) -> list[Check]:
    if name not in SUITES:
        raise KeyError(name)
    out = []
    for c in SUITES[name]:
        for chk in CRITERIA[c](seed):
            out.append(chk)
            if echo is not None:
                echo(chk.line())
    return out
