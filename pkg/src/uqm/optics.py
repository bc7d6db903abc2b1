"""Coherent-state linear optics on mode amplitudes.

Beamsplitters act linearly on amplitudes and never entangle coherent inputs, so
every setup is a unitary matrix G on the vector of amplitudes. A detector on an
output mode with amplitude b stays dark with probability exp(-gamma |b|^2).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar


def _check_t(t: float) -> float:
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"transmittivity {t} outside [0, 1]")
    return float(t)


def beamsplitter_matrix(t: float) -> np.ndarray:
    """(a, b) -> (sqrt(T) a + sqrt(R) b, -sqrt(R) a + sqrt(T) b)."""
    t = _check_t(t)
    st, sr = np.sqrt(t), np.sqrt(1.0 - t)
    return np.array([[st, sr], [-sr, st]], dtype=complex)


def beamsplitter(t: float, a: complex, b: complex) -> tuple[complex, complex]:
    out = beamsplitter_matrix(t) @ np.array([a, b], dtype=complex)
    return complex(out[0]), complex(out[1])


@dataclass
class LinearNetwork:
    """Sequence of two-mode beamsplitters on named modes, composed into one unitary G."""
    modes: list[str]
    G: np.ndarray = field(default=None)
    detectors: dict[str, str] = field(default_factory=dict)
    efficiency: float = 1.0

    def __post_init__(self):
        if self.G is None:
            self.G = np.eye(len(self.modes), dtype=complex)

    def index(self, mode: str) -> int:
        return self.modes.index(mode)

    def add_beamsplitter(self, t: float, first: str, second: str) -> "LinearNetwork":
        i, j = self.index(first), self.index(second)
        step = np.eye(len(self.modes), dtype=complex)
        b = beamsplitter_matrix(t)
        step[np.ix_([i, j], [i, j])] = b
        self.G = step @ self.G
        return self

    def propagate(self, amplitudes: Sequence[complex] | dict[str, complex]) -> dict[str, complex]:
        if isinstance(amplitudes, dict):
            vec = np.array([amplitudes.get(m, 0.0) for m in self.modes], dtype=complex)
        else:
            vec = np.asarray(amplitudes, dtype=complex)
        out = self.G @ vec
        return dict(zip(self.modes, out))

    def dark_probability(self, amplitude: complex) -> float:
        return float(np.exp(-self.efficiency * abs(amplitude) ** 2))

    def detector_dark(self, amplitudes) -> dict[str, float]:
        out = self.propagate(amplitudes)
        return {name: self.dark_probability(out[mode]) for name, mode in self.detectors.items()}

    def pattern_probability(self, amplitudes, clicks: dict[str, bool]) -> float:
        """Probability of a given click pattern; detectors on coherent modes are independent."""
        dark = self.detector_dark(amplitudes)
        p = 1.0
        for name, click in clicks.items():
            p *= (1.0 - dark[name]) if click else dark[name]
        return p

    def is_unitary(self, tol: float = 1e-12) -> bool:
        return bool(np.linalg.norm(self.G.conj().T @ self.G - np.eye(len(self.modes))) <= tol)


def concentrator(k: int, prefix: str = "m") -> LinearNetwork:
    """Cascade merging k equal coherent modes into the first one (T_j = j/(j+1))."""
    if k < 1:
        raise ValueError("k must be positive")
    net = LinearNetwork([f"{prefix}{i}" for i in range(k)])
    for j in range(1, k):
        net.add_beamsplitter(j / (j + 1), f"{prefix}0", f"{prefix}{j}")
    return net


def concentrate(k: int, alpha: complex) -> np.ndarray:
    """Amplitudes after merging k copies of |alpha>: (sqrt(k) alpha, 0, ..., 0)."""
    net = concentrator(k)
    out = net.propagate([alpha] * k)
    return np.array([out[m] for m in net.modes])


def comparison_network(k: int, l: int) -> LinearNetwork:
    """Concentrate k copies of alpha1 and l of alpha2, then interfere with T = k/(k+l)."""
    modes = [f"a{i}" for i in range(k)] + [f"b{i}" for i in range(l)]
    net = LinearNetwork(modes, detectors={"diff": "b0"})
    for j in range(1, k):
        net.add_beamsplitter(j / (j + 1), "a0", f"a{j}")
    for j in range(1, l):
        net.add_beamsplitter(j / (j + 1), "b0", f"b{j}")
    net.add_beamsplitter(k / (k + l), "a0", "b0")
    return net


def compare_coherent_prob(k: int, l: int, delta2) -> np.ndarray | float:
    """1 - exp(-(kl/(k+l)) |alpha1 - alpha2|^2)."""
    return 1.0 - np.exp(-(k * l / (k + l)) * np.asarray(delta2, dtype=float))


def compare_coherent(k: int, l: int, alpha1: complex, alpha2: complex) -> tuple[LinearNetwork, float]:
    """Network and simulated success probability of coherent-state comparison."""
    net = comparison_network(k, l)
    p = 1.0 - net.detector_dark([alpha1] * k + [alpha2] * l)["diff"]
    return net, p


def ui_transmittivities(n_a: float, n_b: float, n_c: float, t1: float) -> tuple[float, float]:
    """T2, T3 that null the A mode when the unknown is ref 1 and the C mode when it is ref 2."""
    t1 = _check_t(t1)
    t2 = n_b / (n_b + n_a * t1)
    t3 = (1 - t1) * n_a / (n_c + (1 - t1) * n_a)
    return t2, t3


def ui_network(n_a: float, n_b: float, n_c: float, t1: float, efficiency: float = 1.0) -> LinearNetwork:
    """Three-beamsplitter identifier on concentrated modes A, B, C and a vacuum mode D.

    B1 splits A into D; B2 interferes B with A; B3 interferes D with C. Detector
    D1 watches C (a click means the unknown equals reference 1); D2 watches A.
    """
    t2, t3 = ui_transmittivities(n_a, n_b, n_c, t1)
    net = LinearNetwork(["A", "B", "C", "D"], detectors={"D1": "C", "D2": "A"}, efficiency=efficiency)
    net.add_beamsplitter(t1, "D", "A")
    net.add_beamsplitter(t2, "B", "A")
    net.add_beamsplitter(t3, "D", "C")
    return net


@dataclass(frozen=True)
class UiResult:
    network: LinearNetwork
    outputs: dict[str, complex]
    dark: dict[str, float]
    p1: float
    p2: float
    probability: float


def ui_two_refs_closed(n_a: float, n_b: float, n_c: float, t1: float, delta2) -> tuple:
    """Closed forms (P1, P2, (P1 + P2)/2) for the three-beamsplitter identifier."""
    d2 = np.asarray(delta2, dtype=float)
    r1 = 1 - t1
    p1 = 1 - np.exp(-n_c * n_a * r1 / (n_c + n_a * r1) * d2)
    p2 = 1 - np.exp(-n_b * n_a * t1 / (n_b + n_a * t1) * d2)
    return p1, p2, 0.5 * (p1 + p2)


def ui_closed(n_a: float, n_b: float, delta2):
    """Equal reference copies and an even split: 1 - exp(-n_A n_B/(n_A + 2 n_B) |Delta|^2)."""
    return 1.0 - np.exp(-n_a * n_b / (n_a + 2 * n_b) * np.asarray(delta2, dtype=float))


def ui_two_refs(n_a: float, n_b: float, n_c: float, t1: float, alpha_u: complex,
                alpha1: complex, alpha2: complex) -> UiResult:
    """Simulate the identifier on concentrated inputs.

    `dark` holds the no-click probabilities of D1 and D2 for the given unknown;
    p1 and p2 are the correct-identification probabilities when the unknown is
    alpha1 or alpha2, each computed by propagating that input.
    """
    net = ui_network(n_a, n_b, n_c, t1)

    def inputs(a):
        return {"A": np.sqrt(n_a) * a, "B": np.sqrt(n_b) * alpha1, "C": np.sqrt(n_c) * alpha2, "D": 0.0}

    out = net.propagate(inputs(alpha_u))
    dark = net.detector_dark(inputs(alpha_u))
    p1 = net.pattern_probability(inputs(alpha1), {"D1": True, "D2": False})
    p2 = net.pattern_probability(inputs(alpha2), {"D1": False, "D2": True})
    return UiResult(net, out, dark, p1, p2, 0.5 * (p1 + p2))


def optimal_split(n_a: float, n_b: float, n_c: float, delta2: float) -> tuple[float, float]:
    """Numeric T1 maximizing the identification probability; depends on |Delta| unless n_B = n_C."""
    res = minimize_scalar(lambda t: -ui_two_refs_closed(n_a, n_b, n_c, t, delta2)[2],
                          bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-10})
    return float(res.x), float(-res.fun)


def m_refs_network(M: int, n_a: float, n_b: float) -> LinearNetwork:
    """Split the concentrated unknown evenly into M parts and interfere part k with reference k."""
    modes = [f"U{k}" for k in range(M)] + [f"R{k}" for k in range(M)]
    net = LinearNetwork(modes, detectors={f"D{k}": f"R{k}" for k in range(M)})
    # even split of U0 into U0..U_{M-1}: the reverse of a concentrator
    for j in range(M - 1, 0, -1):
        net.add_beamsplitter(j / (j + 1), f"U{j}", "U0")
    tk = n_a / (n_a + M * n_b)
    for k in range(M):
        net.add_beamsplitter(tk, f"U{k}", f"R{k}")
    return net


def ui_m_refs_closed(M: int, n_a: float, n_b: float, refs: Sequence[complex]) -> float:
    kappa = n_a * n_b / (n_a + M * n_b)
    refs = np.asarray(refs, dtype=complex)
    total = 0.0
    for j in range(M):
        prod = 1.0
        for k in range(M):
            if k != j:
                prod *= 1 - np.exp(-kappa * abs(refs[j] - refs[k]) ** 2)
        total += prod / M
    return float(total)


def ui_m_refs(M: int, n_a: float, n_b: float, alpha_u: complex | None,
              refs: Sequence[complex]) -> tuple[LinearNetwork, float]:
    """Identifier for M references; conclusion k iff every detector except D_k clicks.

    Returns the network and the identification probability averaged over the
    unknown being each reference with prior 1/M (alpha_u is only used to check
    destructive interference when given).
    """
    net = m_refs_network(M, n_a, n_b)

    def inputs(a):
        d = {f"U{k}": 0.0 for k in range(M)}
        d["U0"] = np.sqrt(n_a) * a
        d.update({f"R{k}": np.sqrt(n_b) * refs[k] for k in range(M)})
        return d

    total = 0.0
    for j in range(M):
        pattern = {f"D{k}": k != j for k in range(M)}
        total += net.pattern_probability(inputs(refs[j]), pattern) / M
    if alpha_u is not None:
        net.propagate(inputs(alpha_u))
    return net, float(total)


def resource_tradeoff(N: int) -> int:
    """Copies n_A (of N total, rest split equally between references) maximizing the exponent."""
    if N < 3:
        raise ValueError("N must be at least 3")
    return N // 2


def resource_exponent(n_a: float, N: float) -> float:
    """n_A n_B/(n_A + 2 n_B) with n_B = (N - n_A)/2, equal to n_A (N - n_A)/(2N)."""
    return n_a * (N - n_a) / (2.0 * N)


def known_states_limit(n_a: float, alpha1: complex, alpha2: complex) -> float:
    """1 - |<alpha1|alpha2>|^{n_A} = 1 - exp(-(n_A/2)|Delta|^2)."""
    return float(1.0 - np.exp(-0.5 * n_a * abs(alpha1 - alpha2) ** 2))


def weak_ui(N: int, alpha1: complex, alpha2: complex) -> tuple[float, float]:
    """Split every resource into N weak copies and run N independent rounds.

    Returns (per-round probability, probability that some round is conclusive).
    """
    if N < 1:
        raise ValueError("N must be positive")
    s = 1.0 / np.sqrt(N)
    res = ui_two_refs(1, 1, 1, 0.5, s * alpha1, s * alpha1, s * alpha2)
    per_round = res.probability
    return per_round, 1.0 - (1.0 - per_round) ** N


def first_round_outputs(alpha_u: complex, alpha1: complex, alpha2: complex) -> dict[str, complex]:
    """Output amplitudes of the single-copy identifier with T1 = 1/2."""
    return ui_network(1, 1, 1, 0.5).propagate({"A": alpha_u, "B": alpha1, "C": alpha2, "D": 0.0})


def repeat_same_unknown(alpha_u: complex, alpha1: complex, alpha2: complex) -> dict:
    """Reuse the unmeasured B and D outputs as references for a fresh copy of the same unknown.

    The second identifier uses T1 = 1/2, T2 = 3/4, T3 = 1/4; its measured modes
    carry (alpha_u - alpha1)/sqrt(6) and (alpha2 - alpha_u)/sqrt(6).
    """
    first = first_round_outputs(alpha_u, alpha1, alpha2)
    net = LinearNetwork(["A", "B", "C", "D"], detectors={"D1": "C", "D2": "A"})
    net.add_beamsplitter(0.5, "D", "A")
    net.add_beamsplitter(0.75, "B", "A")
    net.add_beamsplitter(0.25, "D", "C")
    out = net.propagate({"A": alpha_u, "B": first["B"], "C": first["D"], "D": 0.0})
    d2 = abs(alpha1 - alpha2) ** 2
    return {"network": net, "outputs": out, "first": first,
            "conditional_probability": float(1.0 - np.exp(-d2 / 6.0))}


def recovery_f(x):
    """Dilution map lambda_k -> lambda_{k+1} of the recovery rounds."""
    x = np.asarray(x, dtype=float)
    s = 1 + 2 * x
    return (s**2 - 2 * x**2 - np.sqrt(4 * x**4 + s**2)) / (2 * s)


def recovery_transmittivities(lam: float) -> tuple[float, float]:
    s = 1 + 2 * lam
    t1r = 1 - (2 * lam**2 + np.sqrt(4 * lam**4 + s**2)) / s**2
    t2r = (1 - t1r) * s**2 / (1 + (1 - t1r) * s**2)
    return float(t1r), float(t2r)


def recovery_round(lam: float) -> tuple[float, float, float]:
    """(T1^R, T2^R, lambda_next) for references diluted by sqrt(lam), closed-form map."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    t1r, t2r = recovery_transmittivities(lam)
    return t1r, t2r, float(recovery_f(lam))


def recovery_round_network(lam: float) -> tuple[float, float, float]:
    """(T1^R, T2^R, lambda_next) solving the propagated network for equal recovered references.

    With B carrying sqrt((1+2 lam)/2) alpha1 and the alpha2 part of D being
    lam sqrt(2/(1+2 lam)) alpha2, cancellation plus equal dilution give
    s^2 x^2 - (1 + s^2 + 4 lam^2) x + 4 lam^2 = 0 for x = T1^R, s = 1 + 2 lam.
    It coincides with the closed-form map at lam = 1 only.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    s = 1 + 2 * lam
    b = 1 + s**2 + 4 * lam**2
    x = (b - np.sqrt(b**2 - 16 * lam**2 * s**2)) / (2 * s**2)
    t2r = (1 - x) * s**2 / (1 + (1 - x) * s**2)
    return float(x), float(t2r), float(x * s / 2)


def simulate_recovery_round(lam: float, alpha1: complex, alpha2: complex,
                            transmittivities: tuple[float, float] | None = None) -> dict[str, complex]:
    """Propagate one identification round (unknown = alpha1) plus the recovery beamsplitters.

    Returns the recovered amplitudes for both references; each should equal
    sqrt(lambda_next) times the original amplitude.
    """
    ident = ui_network(1, lam, lam, 0.5)
    out = ident.propagate({"A": alpha1, "B": np.sqrt(lam) * alpha1, "C": np.sqrt(lam) * alpha2, "D": 0.0})
    t1r, t2r = transmittivities if transmittivities is not None else recovery_transmittivities(lam)
    rec = LinearNetwork(["B", "X", "D"])
    # split B into the kept reference and a part X that cancels alpha1 in D
    rec.add_beamsplitter(t1r, "X", "B")
    rec.add_beamsplitter(t2r, "X", "D")
    r = rec.propagate({"B": out["B"], "X": 0.0, "D": out["D"]})
    return {"ref1": r["B"], "ref2": r["D"], "junk": r["X"]}


def dilution_sequence(rounds: int, network: bool = False) -> np.ndarray:
    """lambda_1..lambda_rounds starting from 1; `network` selects the propagated-network map."""
    lam = np.empty(rounds)
    lam[0] = 1.0
    for k in range(1, rounds):
        if network:
            lam[k] = recovery_round_network(lam[k - 1])[2] if lam[k - 1] > 0 else 0.0
        else:
            lam[k] = recovery_f(lam[k - 1])
    return lam


def multi_round_success(rounds: int, delta2, network: bool = False) -> np.ndarray:
    """P^(k) for k = 1..rounds; row k-1 holds round k for each |Delta|^2 given."""
    if rounds < 1:
        raise ValueError("rounds must be positive")
    d2 = np.atleast_1d(np.asarray(delta2, dtype=float))
    lam = dilution_sequence(rounds, network)
    out = np.empty((rounds, d2.size))
    p = np.ones_like(d2)
    for k in range(rounds):
        p = p * (1 - np.exp(-lam[k] / (1 + 2 * lam[k]) * d2))
        out[k] = p
    return out


def splitting_strategy(N: int, delta2):
    """All N identifications succeed when references are pre-split into N weak copies."""
    if N < 1:
        raise ValueError("N must be positive")
    return (1 - np.exp(-np.asarray(delta2, dtype=float) / (N + 2))) ** N


def gaussian_integral(m: int, a: float, b: float, sigma: float, x: complex) -> float:
    """I_m = b/(b + 2 a sigma^2 m) exp(-a |x|^2/(b + 2 m a sigma^2)).

    Average of exp(-(a/b)|x + sum of m weighted noise terms|^2) computed by the recursion
    over complex Gaussian noise with per-quadrature variance sigma^2.
    """
    if b <= 0 or a < 0:
        raise ValueError("need b > 0 and a >= 0")
    den = b + 2 * m * a * sigma**2
    return float(b / den * np.exp(-a * abs(x) ** 2 / den))


@dataclass(frozen=True)
class NoiseModel:
    sigma: float
    xi: float = 1.0

    def __post_init__(self):
        if self.sigma < 0 or self.xi < 0:
            raise ValueError("sigma and xi must be nonnegative")


def noise_kappas(n_a: float, n_b: float, n_c: float) -> tuple[float, float]:
    return n_a * n_b / (n_a + 2 * n_b), n_a * n_c / (n_a + 2 * n_c)


def noisy_dark_probs(n_a, n_b, n_c, sigma, alpha_u, alpha1, alpha2) -> tuple[float, float]:
    """No-click probabilities of D1 (mode C) and D2 (mode A) under technical noise, T1 = 1/2."""
    g = 1 + 2 * sigma**2
    kb, kc = noise_kappas(n_a, n_b, n_c)
    p_d1 = np.exp(-kc * abs(alpha_u - alpha2) ** 2 / g) / g
    p_d2 = np.exp(-kb * abs(alpha_u - alpha1) ** 2 / g) / g
    return float(p_d1), float(p_d2)


def noisy_click_matrix(n_a, n_b, n_c, sigma, alpha1, alpha2) -> np.ndarray:
    """Entry [i, j] = Tr(E_{i+1} rho_{j+1}) for the noisy identifier at T1 = 1/2."""
    out = np.empty((2, 2))
    for j, au in enumerate((alpha1, alpha2)):
        d1, d2 = noisy_dark_probs(n_a, n_b, n_c, sigma, au, alpha1, alpha2)
        out[0, j] = (1 - d1) * d2
        out[1, j] = d1 * (1 - d2)
    return out


def noisy_click_closed(n_a, n_b, n_c, sigma, delta2) -> np.ndarray:
    g = 1 + 2 * sigma**2
    kb, kc = noise_kappas(n_a, n_b, n_c)
    ec = np.exp(-kc * delta2 / g)
    eb = np.exp(-kb * delta2 / g)
    return np.array([[(g - ec) / g**2, 2 * sigma**2 * eb / g**2],
                     [2 * sigma**2 * ec / g**2, (g - eb) / g**2]])


def reliability(n_a: float, n_b: float, sigma: float, xi: float) -> float:
    """Posterior probability that a conclusive outcome is right under phase keying."""
    if xi <= 0:
        raise ValueError("xi must be positive")
    theta = (n_a + 2 * n_b) / (n_a * n_b) * (sigma / (2 * xi)) ** 2
    return (1 + theta) / (1 + 2 * theta)


def noisy_averages(n_a: float, n_b: float, sigma: float, xi: float) -> tuple[float, float, float]:
    """Averaged (success, error, failure) under phase keying."""
    g = 1 + 2 * sigma**2
    k = g + 8 * n_a * n_b / (n_a + 2 * n_b) * xi**2
    p = (1 - 1 / k) / g
    pe = 2 * sigma**2 / (g * k)
    pf = 2 * sigma**2 / g + (1 - 2 * sigma**2) / (g * k)
    return p, pe, pf


def detector_curves(t0: float, efficiency: float, delta2) -> tuple:
    """Correct-identification probabilities of the two references with detector efficiency."""
    if not 0.0 <= efficiency <= 1.0:
        raise ValueError("efficiency must lie in [0, 1]")
    d2 = np.asarray(delta2, dtype=float)
    p1 = 1 - np.exp(-efficiency * (1 - t0) / (2 - t0) * d2)
    p2 = 1 - np.exp(-efficiency * t0 / (1 + t0) * d2)
    return p1, p2


def lambda2_constraint(n_a: float, n_b: float, l1sq):
    """|lambda_2|^2 allowed by unitarity for a given |lambda_1|^2 (equal reference copies)."""
    l1sq = np.asarray(l1sq, dtype=float)
    return (n_a * n_b - (n_a + n_b) * l1sq) / (n_a + n_b - (2 + n_a / n_b) * l1sq)


def linear_optics_optimum_check(n_a: float, n_b: float, delta: float) -> tuple[float, float, float]:
    """Maximize (P1 + P2)/2 over |lambda_1|^2 under the unitarity constraint.

    Returns (|lambda_1|^2, |lambda_2|^2, P) at the numeric optimum.
    """
    d2 = delta**2
    upper = n_a * n_b / (n_a + n_b)

    def neg(l1):
        l2 = lambda2_constraint(n_a, n_b, l1)
        return -0.5 * ((1 - np.exp(-l1 * d2)) + (1 - np.exp(-l2 * d2)))

    res = minimize_scalar(neg, bounds=(0.0, upper), method="bounded", options={"xatol": 1e-12})
    l1 = float(res.x)
    return l1, float(lambda2_constraint(n_a, n_b, l1)), float(-res.fun)
