"""Independent numerical cross-checks: brute-force optimization, quadrature and Monte Carlo.

Nothing here uses the closed forms it is meant to check.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import dblquad
from scipy.optimize import minimize, minimize_scalar

from .operators import antisymmetric_projector, make_rng, symmetric_projector
from .optics import LinearNetwork, ui_transmittivities


@dataclass(frozen=True)
class McEstimate:
    mean: float
    se: float
    n: int

    def agrees(self, value: float, k: float = 3.0) -> bool:
        return abs(self.mean - value) <= k * self.se + 1e-15


def mc(samples: np.ndarray) -> McEstimate:
    s = np.asarray(samples, dtype=float)
    return McEstimate(float(s.mean()), float(s.std(ddof=1) / np.sqrt(s.size)), int(s.size))


def haar_states(d: int, n: int, rng) -> np.ndarray:
    """n Haar-random unit vectors in C^d, one per row."""
    z = rng.normal(size=(n, d)) + 1j * rng.normal(size=(n, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def haar_unitaries(d: int, n: int, rng) -> np.ndarray:
    z = (rng.normal(size=(n, d, d)) + 1j * rng.normal(size=(n, d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r, axis1=1, axis2=2)
    return q * (ph / np.abs(ph))[:, None, :]


# ---------------------------------------------------------------- two pure states

def brute_force_idp(lam: float, eta1: float, grid: int = 200) -> float:
    """Optimal unambiguous success for two pure states with overlap lam, by direct search.

    Effects E1 = c1 |perp2><perp2|, E2 = c2 |perp1><perp1| are forced by the no-error
    conditions; for each c1 the largest feasible c2 is found by bisection on the
    smallest eigenvalue of I - E1 - E2, then c1 is refined by golden-section search.
    """
    psi1 = np.array([1.0, 0.0])
    psi2 = np.array([lam, np.sqrt(1 - lam**2)])
    perp1 = np.array([0.0, 1.0])
    perp2 = np.array([np.sqrt(1 - lam**2), -lam])
    p1 = np.outer(perp2, perp2)
    p2 = np.outer(perp1, perp1)

    def c2_max(c1):
        if np.linalg.eigvalsh(np.eye(2) - c1 * p1)[0] < 0:
            return -1.0
        lo, hi = 0.0, 1.0
        if np.linalg.eigvalsh(np.eye(2) - c1 * p1 - p2)[0] >= 0:
            return 1.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if np.linalg.eigvalsh(np.eye(2) - c1 * p1 - mid * p2)[0] >= 0:
                lo = mid
            else:
                hi = mid
        return lo

    def success(c1):
        c2 = c2_max(c1)
        if c2 < 0:
            return -1.0
        return eta1 * c1 * (perp2 @ psi1) ** 2 + (1 - eta1) * c2 * (perp1 @ psi2) ** 2

    cs = np.linspace(0.0, 1.0, grid)
    vals = np.array([success(c) for c in cs])
    i = int(vals.argmax())
    lo, hi = cs[max(i - 1, 0)], cs[min(i + 1, grid - 1)]
    res = minimize_scalar(lambda c: -success(c), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    return float(max(vals.max(), -res.fun))


# ---------------------------------------------------------------- comparison

def comparison_mc(d: int, k: int, l: int, n: int, rng, batch: int = 4096) -> McEstimate:
    """Haar average of Tr((I - P_sym) psi^{(x)k} (x) phi^{(x)l}) by explicit state vectors."""
    rng = make_rng(rng)
    psym = symmetric_projector(d, k + l)
    vals = np.empty(n)
    for start in range(0, n, batch):
        m = min(batch, n - start)
        a = haar_states(d, m, rng)
        b = haar_states(d, m, rng)
        v = np.ones((m, 1), dtype=complex)
        for f in [a] * k + [b] * l:
            v = np.einsum("ni,nj->nij", v, f).reshape(m, -1)
        vals[start:start + m] = 1.0 - np.linalg.norm(v @ psym.T, axis=1) ** 2
    return mc(vals)


def comparison_mc_overlap(d: int, k: int, l: int, n: int, rng, prob) -> McEstimate:
    """Haar average of prob(x) with x = |<psi|phi>|^2 (prob is a per-pair success function)."""
    rng = make_rng(rng)
    a = haar_states(d, n, rng)
    b = haar_states(d, n, rng)
    x = np.abs(np.einsum("ij,ij->i", a.conj(), b)) ** 2
    return mc(prob(k, l, x))


def coherent_overlap_quadrature(k: int, l: int, alpha1: complex, alpha2: complex) -> float:
    """((k+l)/pi) * integral over beta of exp(-k|alpha1 - beta|^2 - l|alpha2 - beta|^2)."""
    def f(y, x):
        b = x + 1j * y
        return np.exp(-k * abs(alpha1 - b) ** 2 - l * abs(alpha2 - b) ** 2)

    c = (k * alpha1 + l * alpha2) / (k + l)
    w = 8.0 / np.sqrt(k + l)
    val, _ = dblquad(f, c.real - w, c.real + w, lambda x: c.imag - w, lambda x: c.imag + w,
                     epsabs=1e-13, epsrel=1e-12)
    return float((k + l) / np.pi * val)


# ---------------------------------------------------------------- identification

def ui_mc(measurement, n: int, rng) -> McEstimate:
    """Haar average identification probability of a two-reference UiMeasurement."""
    rng = make_rng(rng)
    d = measurement.d
    r1 = haar_states(d, n, rng)
    r2 = haar_states(d, n, rng)
    eff = measurement.povm.effects
    vals = np.zeros(n)
    for i, (e, eta) in enumerate(zip(eff[:2], measurement.etas)):
        unk = r1 if i == 0 else r2
        sig = np.einsum("na,nb,nc->nabc", unk, r1, r2).reshape(n, -1)
        vals += eta * np.einsum("ni,ij,nj->n", sig.conj(), e, sig).real
    return mc(vals)


def bergou_hillery_search(eta1: float) -> tuple[float, float, float]:
    """Maximize the mean over E1 = a P_AC^asym, E2 = b P_AB^asym subject to E0 >= 0 (SLSQP)."""
    pac = antisymmetric_projector(2, 2, [0, 2], 3)
    pab = antisymmetric_projector(2, 2, [0, 1], 3)

    def mean(x):
        return (eta1 * x[0] + (1 - eta1) * x[1]) / 4.0

    def cons(x):
        return np.linalg.eigvalsh(np.eye(8) - x[0] * pac - x[1] * pab)[0]

    best = None
    for x0 in ([0.3, 0.3], [0.9, 0.05], [0.05, 0.9], [0.6, 0.6]):
        res = minimize(lambda x: -mean(x), x0, method="SLSQP", bounds=[(0, 1), (0, 1)],
                       constraints=[{"type": "ineq", "fun": cons}],
                       options={"ftol": 1e-15, "maxiter": 500})
        if cons(res.x) > -1e-9 and (best is None or -res.fun > best[2]):
            best = (float(res.x[0]), float(res.x[1]), float(-res.fun))
    return best


# ---------------------------------------------------------------- channels

def diagonal_xi_minimum(phases: np.ndarray, restarts: int = 20, rng=0) -> float:
    """min over probability vectors w of |sum_k w_k e^{i phase_k}|."""
    rng = make_rng(rng)
    z = np.exp(1j * np.asarray(phases))
    n = len(z)

    def obj(w):
        return abs(w @ z) ** 2

    best = np.inf
    for _ in range(restarts):
        w0 = rng.dirichlet(np.ones(n))
        res = minimize(obj, w0, method="SLSQP", bounds=[(0, 1)] * n,
                       constraints=[{"type": "eq", "fun": lambda w: w.sum() - 1}],
                       options={"ftol": 1e-16, "maxiter": 1000})
        best = min(best, np.sqrt(max(res.fun, 0.0)))
    return float(best)


def comparator_mc(d: int, rho: np.ndarray, n: int, rng, symmetric: bool = False) -> McEstimate:
    rng = make_rng(rng)
    us = haar_unitaries(d, n, rng)
    vs = haar_unitaries(d, n, rng)
    w = np.einsum("nab,ncd->nacbd", us, vs).reshape(n, d * d, d * d)
    out = w @ rho @ np.conj(np.transpose(w, (0, 2, 1)))
    proj = antisymmetric_projector(d, 2) if symmetric else symmetric_projector(d, 2)
    return mc(np.einsum("ij,nji->n", proj, out).real)


def twirl_mc(y: np.ndarray, d: int, n: int, rng) -> np.ndarray:
    rng = make_rng(rng)
    us = haar_unitaries(d, n, rng)
    w = np.einsum("nab,ncd->nacbd", us, us).reshape(n, d * d, d * d)
    return (w @ y @ np.conj(np.transpose(w, (0, 2, 1)))).mean(axis=0)


# ---------------------------------------------------------------- measurements

def labeled_mc(d: int, rho: np.ndarray, n: int, rng) -> McEstimate:
    """Haar average of sum_j Tr(rho A_j (x) B_j) for independent random bases A, B."""
    rng = make_rng(rng)
    ua = haar_unitaries(d, n, rng)
    ub = haar_unitaries(d, n, rng)
    vals = np.zeros(n)
    for j in range(d):
        v = np.einsum("na,nb->nab", ua[:, :, j], ub[:, :, j]).reshape(n, -1)
        vals += np.einsum("ni,ij,nj->n", v.conj(), rho, v).real
    return mc(vals)


def unlabeled_mc(test_state: np.ndarray, n: int, rng) -> McEstimate:
    """Haar average of <phi_Q|O_same,diff + O_diff,same|phi_Q> by contracting rank-one projectors."""
    rng = make_rng(rng)
    ua = haar_unitaries(2, n, rng)
    ub = haar_unitaries(2, n, rng)
    t = test_state.reshape(2, 2, 2, 2)
    vals = np.zeros(n)
    for i in range(2):
        for j in range(2):
            for a in range(2):
                for b in range(2):
                    same_a, same_b = i == j, a == b
                    if same_a == same_b:
                        continue
                    amp = np.einsum("wxyz,nw,nx,ny,nz->n", t, ua[:, :, i].conj(), ua[:, :, j].conj(),
                                    ub[:, :, a].conj(), ub[:, :, b].conj())
                    vals += np.abs(amp) ** 2
    return mc(vals)


def equal_outcome_mc(cls: tuple, n: int, rng) -> np.ndarray:
    """Haar average of A_x (x) A_y for a common random qubit basis."""
    rng = make_rng(rng)
    us = haar_unitaries(2, n, rng)
    acc = np.zeros((16, 16), dtype=complex)
    pairs = {"same": [(0, 0), (1, 1)], "diff": [(0, 1), (1, 0)]}
    for (i, j) in pairs[cls[0]]:
        for (a, b) in pairs[cls[1]]:
            v = np.einsum("nw,nx,ny,nz->nwxyz", us[:, :, i], us[:, :, j], us[:, :, a], us[:, :, b]).reshape(n, 16)
            acc += np.einsum("ni,nj->ij", v, v.conj())
    return acc / n


# ---------------------------------------------------------------- noisy coherent identification

def noisy_network(n_a: int, n_b: int, n_c: int) -> LinearNetwork:
    """Concentrators for every species followed by the three-beamsplitter identifier (T1 = 1/2)."""
    modes = ([f"A{i}" for i in range(n_a)] + [f"B{i}" for i in range(n_b)]
             + [f"C{i}" for i in range(n_c)] + ["D"])
    net = LinearNetwork(modes, detectors={"D1": "C0", "D2": "A0"})
    for tag, n in (("A", n_a), ("B", n_b), ("C", n_c)):
        for j in range(1, n):
            net.add_beamsplitter(j / (j + 1), f"{tag}0", f"{tag}{j}")
    t2, t3 = ui_transmittivities(n_a, n_b, n_c, 0.5)
    net.add_beamsplitter(0.5, "D", "A0")
    net.add_beamsplitter(t2, "B0", "A0")
    net.add_beamsplitter(t3, "D", "C0")
    return net


def _noisy_outputs(net, n_a, n_b, n_c, sigma, alpha_u, alpha1, alpha2, rng):
    """Detector amplitudes for a batch of noisy inputs (alphas are arrays of equal length)."""
    n = len(alpha_u)
    size = n_a + n_b + n_c + 1
    noise = sigma * (rng.normal(size=(n, size)) + 1j * rng.normal(size=(n, size)))
    centers = np.concatenate([np.repeat(alpha_u[:, None], n_a, 1), np.repeat(alpha1[:, None], n_b, 1),
                              np.repeat(alpha2[:, None], n_c, 1), np.zeros((n, 1))], axis=1)
    out = (centers + noise) @ net.G.T
    return out[:, net.index("C0")], out[:, net.index("A0")]


def noisy_click_mc(n_a, n_b, n_c, sigma, alpha1, alpha2, n: int, rng, batch: int = 250_000) -> tuple:
    """Monte Carlo of Tr(E_i rho_j) (returned as 2x2 arrays of means and standard errors)."""
    rng = make_rng(rng)
    net = noisy_network(n_a, n_b, n_c)
    means = np.zeros((2, 2))
    ses = np.zeros((2, 2))
    for j, au in enumerate((alpha1, alpha2)):
        e1, e2 = [], []
        done = 0
        while done < n:
            m = min(batch, n - done)
            c, a = _noisy_outputs(net, n_a, n_b, n_c, sigma, np.full(m, au, complex),
                                  np.full(m, alpha1, complex), np.full(m, alpha2, complex), rng)
            dark1, dark2 = np.exp(-abs(c) ** 2), np.exp(-abs(a) ** 2)
            e1.append((1 - dark1) * dark2)
            e2.append(dark1 * (1 - dark2))
            done += m
        for i, arr in enumerate((np.concatenate(e1), np.concatenate(e2))):
            est = mc(arr)
            means[i, j], ses[i, j] = est.mean, est.se
    return means, ses


@dataclass(frozen=True)
class PhaseKeyingMc:
    success: McEstimate
    error: McEstimate
    failure: McEstimate
    reliability: float
    reliability_se: float


def phase_keying_mc(n_a, n_b, sigma, xi, n: int, rng, batch: int = 250_000) -> PhaseKeyingMc:
    """Noisy identifier with alpha1 = alpha = -alpha2, alpha complex Gaussian, equal priors."""
    rng = make_rng(rng)
    net = noisy_network(n_a, n_b, n_b)
    good, bad = [], []
    done = 0
    while done < n:
        m = min(batch, n - done)
        alpha = xi * (rng.normal(size=m) + 1j * rng.normal(size=m))
        which = rng.integers(0, 2, size=m)
        au = np.where(which == 0, alpha, -alpha)
        c, a = _noisy_outputs(net, n_a, n_b, n_b, sigma, au, alpha, -alpha, rng)
        dark1, dark2 = np.exp(-abs(c) ** 2), np.exp(-abs(a) ** 2)
        click1 = (1 - dark1) * dark2
        click2 = dark1 * (1 - dark2)
        good.append(np.where(which == 0, click1, click2))
        bad.append(np.where(which == 0, click2, click1))
        done += m
    g, b = np.concatenate(good), np.concatenate(bad)
    f = 1 - g - b
    gm, bm = g.mean(), b.mean()
    r = gm / (gm + bm)
    # delta method for the ratio of means
    cov = np.cov(np.vstack([g, b]))
    grad = np.array([bm, -gm]) / (gm + bm) ** 2
    r_se = float(np.sqrt(grad @ cov @ grad / g.size))
    return PhaseKeyingMc(mc(g), mc(b), mc(f), float(r), r_se)


def gaussian_integral_mc(m: int, a: float, b: float, sigma: float, x: complex, n: int, rng) -> McEstimate:
    """Average of exp(-(a/b)|x + sum_{k<=m} noise_k|^2) with per-quadrature variance sigma^2.

    Matches I_m with the normalization used there: each noise term enters with weight 1.
    """
    rng = make_rng(rng)
    z = sigma * (rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m)))
    return mc(np.exp(-(a / b) * abs(x + z.sum(axis=1)) ** 2))
