"""Unambiguous discrimination and comparison of quantum channels via Choi operators.

Convention: Psi+ = sum_{jk} |jj><kk| (trace D); a channel E is represented by
omega_E = (I (x) E)[Psi+]. A process POVM {M_j} on the doubled space satisfies
sum_j M_j = xi^T (x) I for a state xi, and outcome j has probability Tr(M_j omega_E).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize, nnls

from .operators import (Povm, antisymmetric_projector, dag, default_tol, kron, make_rng,
                        min_eig, partial_trace, psd_sqrt, support_projector, symmetric_dim,
                        symmetric_projector, trace_norm)
from .usd import idp_optimal, idp_success


@dataclass(frozen=True)
class ChoiOperator:
    D: int
    omega: np.ndarray

    def __post_init__(self):
        if self.omega.shape != (self.D**2, self.D**2):
            raise ValueError("omega must act on a D^2-dimensional space")


@dataclass
class Ppovm:
    D: int
    elements: list[np.ndarray]
    xi: np.ndarray
    labels: tuple = ()

    def probabilities(self, channel: ChoiOperator | np.ndarray) -> np.ndarray:
        omega = channel.omega if isinstance(channel, ChoiOperator) else channel
        return np.array([np.trace(m @ omega).real for m in self.elements])


@dataclass(frozen=True)
class PpovmReport:
    min_eigenvalues: tuple
    xi: np.ndarray
    normalization_error: float
    xi_valid: bool
    valid: bool

    def __bool__(self):
        return self.valid


def max_entangled(D: int) -> np.ndarray:
    v = np.eye(D, dtype=complex).ravel()
    return np.outer(v, v)


def choi_of_unitary(u: np.ndarray, tol: float | None = None) -> ChoiOperator:
    tol = default_tol() if tol is None else tol
    u = np.asarray(u, dtype=complex)
    D = u.shape[0]
    if np.linalg.norm(dag(u) @ u - np.eye(D)) > max(tol, 1e-10) * D:
        raise ValueError("operator is not unitary")
    w = np.kron(np.eye(D), u)
    return ChoiOperator(D, w @ max_entangled(D) @ dag(w))


def choi_of_kraus(kraus: Sequence[np.ndarray]) -> ChoiOperator:
    D = kraus[0].shape[1]
    psi = max_entangled(D)
    out = sum(np.kron(np.eye(D), k) @ psi @ dag(np.kron(np.eye(D), k)) for k in kraus)
    return ChoiOperator(D, out)


def depolarizing_choi(D: int, p: float) -> ChoiOperator:
    """(1 - p) identity channel + p completely depolarizing channel."""
    return ChoiOperator(D, (1 - p) * max_entangled(D) + p * np.eye(D * D) / D)


def validate_ppovm(p: Ppovm, tol: float | None = None) -> PpovmReport:
    tol = default_tol() if tol is None else tol
    D = p.D
    mins = tuple(min_eig(m) for m in p.elements)
    total = sum(p.elements)
    xi_t = partial_trace(total, [1], [D, D]) / D
    err = float(np.linalg.norm(total - np.kron(xi_t, np.eye(D))))
    xi = xi_t.T
    xi_ok = bool(min_eig(xi) >= -tol and abs(np.trace(xi) - 1) <= tol)
    valid = all(m >= -tol for m in mins) and err <= tol * max(1.0, D) and xi_ok
    return PpovmReport(mins, xi, err, xi_ok, valid)


def usd_feasible(omega1: ChoiOperator, omega2: ChoiOperator, tol: float | None = None) -> bool:
    """Two channels can be told apart unambiguously iff their Choi supports differ."""
    s1 = support_projector(omega1.omega, tol)
    s2 = support_projector(omega2.omega, tol)
    return bool(np.linalg.norm(s1 - s2) > 1e-6)


def origin_in_hull(phases: np.ndarray, tol: float = 1e-10) -> bool:
    """True iff no open semicircle contains every unit vector e^{i phase}."""
    th = np.sort(np.mod(np.asarray(phases, dtype=float), 2 * np.pi))
    gaps = np.diff(np.concatenate([th, [th[0] + 2 * np.pi]]))
    return bool(gaps.max() <= np.pi + tol)


@dataclass(frozen=True)
class CbFidelity:
    value: float
    xi: np.ndarray
    phases: np.ndarray
    eigenvectors: np.ndarray
    weights: np.ndarray


def cb_fidelity_unitaries(u: np.ndarray, v: np.ndarray) -> CbFidelity:
    """min_xi |Tr(xi U^dag V)| with a minimizing state diagonal in the eigenbasis of U^dag V."""
    w = dag(u) @ v
    ev, vecs = np.linalg.eig(w)
    # eigenvectors of a unitary: orthonormalize degenerate blocks
    vecs, _ = np.linalg.qr(vecs)
    ev = np.array([vecs[:, k].conj() @ w @ vecs[:, k] for k in range(len(ev))])
    phases = np.angle(ev)
    n = len(ev)
    weights = np.zeros(n)
    if origin_in_hull(phases):
        a = np.vstack([ev.real, ev.imag, 1e3 * np.ones(n)])
        sol, _ = nnls(a, np.array([0.0, 0.0, 1e3]))
        weights = sol / sol.sum()
        value = 0.0
    else:
        best, pair = np.inf, (0, 0)
        for k in range(n):
            for l in range(k, n):
                m = abs(ev[k] + ev[l]) / 2
                if m < best:
                    best, pair = m, (k, l)
        weights[pair[0]] += 0.5
        weights[pair[1]] += 0.5
        value = float(best)
    xi = (vecs * weights) @ dag(vecs)
    return CbFidelity(value, xi, phases, vecs, weights)


def unitary_overlap(u: np.ndarray, v: np.ndarray, xi: np.ndarray) -> float:
    return float(abs(np.trace(xi @ dag(u) @ v)))


@dataclass
class UnitaryUsdResult:
    probability: float
    fidelity: float
    test_state: np.ndarray
    xi: np.ndarray
    povm: Povm
    ppovm: Ppovm
    swapped: bool


def unitary_usd(u: np.ndarray, v: np.ndarray, eta_u: float, eta_v: float | None = None) -> UnitaryUsdResult:
    """Optimal unambiguous discrimination of two unitary channels with a pure test state.

    The test state sum_k sqrt(w_k) |k> (x) |phi_k> uses the minimizing weights of the
    cb fidelity; the POVM on ancilla (x) system is the pure-state optimum for
    (I (x) U)|phi>, (I (x) V)|phi>. Effects are returned in the order (U, V, ?).
    """
    eta_v = 1 - eta_u if eta_v is None else eta_v
    if abs(eta_u + eta_v - 1) > 1e-12 or min(eta_u, eta_v) < 0:
        raise ValueError("priors must be nonnegative and sum to 1")
    swapped = eta_u < eta_v
    a, b, ea = (v, u, eta_v) if swapped else (u, v, eta_u)
    D = u.shape[0]
    cb = cb_fidelity_unitaries(a, b)
    # A[k, j] = sqrt(w_k) phi_k[j] so that (A (x) I) sum_j |jj> = sum_k sqrt(w_k)|k>|phi_k>
    amat = np.sqrt(cb.weights)[:, None] * cb.eigenvectors.T
    phi = sum(np.sqrt(cb.weights[k]) * np.kron(np.eye(D)[k], cb.eigenvectors[:, k]) for k in range(D))
    phi_a = np.kron(np.eye(D), a) @ phi
    phi_b = np.kron(np.eye(D), b) @ phi
    f = cb.value
    if f < 1e-12:
        e_a = np.outer(phi_a, phi_a.conj())
        e_b = np.outer(phi_b, phi_b.conj())
        e0 = np.eye(D * D) - e_a - e_b
        sol_povm = Povm([e_a, e_b, e0], ("1", "2", "?"))
        prob = 1.0
    else:
        sol = idp_optimal(phi_a, phi_b, ea)
        sol_povm = sol.povm
        prob = float(idp_success(f, ea))
    effects = list(sol_povm.effects)
    if swapped:
        effects[0], effects[1] = effects[1], effects[0]
    povm = Povm(effects, ("U", "V", "?"))
    lift = np.kron(amat, np.eye(D))
    elements = [dag(lift) @ e @ lift for e in effects]
    xi = (dag(amat) @ amat).T
    ppovm = Ppovm(D, elements, xi, ("U", "V", "?"))
    return UnitaryUsdResult(prob, f, phi, xi, povm, ppovm, swapped)


def _density_from_params(x: np.ndarray, D: int) -> np.ndarray:
    idx = np.tril_indices(D)
    n = len(idx[0])
    L = np.zeros((D, D), dtype=complex)
    L[idx] = x[:n] + 1j * x[n:]
    rho = L @ dag(L)
    return rho / np.trace(rho).real


@dataclass(frozen=True)
class FidelityBound:
    bound: float
    fidelity: float
    xi: np.ndarray


def cb_fidelity(omega1: ChoiOperator, omega2: ChoiOperator, restarts: int = 10,
                rng=0) -> tuple[float, np.ndarray]:
    """min_xi Tr|sqrt(omega1) (xi^T (x) I) sqrt(omega2)| over xi = L L^dag / Tr(L L^dag)."""
    D = omega1.D
    s1, s2 = psd_sqrt(omega1.omega), psd_sqrt(omega2.omega)
    rng = make_rng(rng)
    npar = D * (D + 1)

    def obj(x):
        xi = _density_from_params(x, D)
        return trace_norm(s1 @ np.kron(xi.T, np.eye(D)) @ s2)

    best = (np.inf, None)
    starts = [np.concatenate([np.eye(D)[np.tril_indices(D)], np.zeros(npar // 2)])]
    starts += [rng.normal(size=npar) for _ in range(restarts - 1)]
    for x0 in starts:
        res = minimize(obj, x0, method="Powell", options={"xtol": 1e-10, "ftol": 1e-13, "maxfev": 40000})
        if res.fun < best[0]:
            best = (float(res.fun), _density_from_params(res.x, D))
    return best


def channel_fidelity_bound(omega1: ChoiOperator, omega2: ChoiOperator, eta1: float,
                           restarts: int = 10, rng=0) -> FidelityBound:
    """Upper bound 1 - 2 sqrt(eta1 eta2) F_cb on the unambiguous success probability."""
    f, xi = cb_fidelity(omega1, omega2, restarts, rng)
    return FidelityBound(float(1 - 2 * np.sqrt(eta1 * (1 - eta1)) * f), f, xi)


def average_channel(x: np.ndarray, d: int) -> np.ndarray:
    return np.trace(x) / d * np.eye(d)


def twirl(y: np.ndarray, d: int) -> np.ndarray:
    ps = symmetric_projector(d, 2)
    pa = antisymmetric_projector(d, 2)
    ds, da = symmetric_dim(d, 2), d * (d - 1) // 2
    out = np.trace(y @ ps) / ds * ps
    if da:
        out = out + np.trace(y @ pa) / da * pa
    return out


def twirl_choi(d: int) -> np.ndarray:
    """(I_12 (x) T_34)[Psi+_13 (x) Psi+_24] assembled entry by entry."""
    D = d * d
    out = np.zeros((D * D, D * D), dtype=complex)
    for jm in range(D):
        for kn in range(D):
            e = np.zeros((D, D))
            e[jm, kn] = 1.0
            out += np.kron(e, twirl(e, d))
    return out


def twirl_choi_closed(d: int) -> np.ndarray:
    ps, pa = symmetric_projector(d, 2), antisymmetric_projector(d, 2)
    ds, da = symmetric_dim(d, 2), d * (d - 1) // 2
    return np.kron(ps, ps) / ds + np.kron(pa, pa) / da


def _check_antisymmetric(d: int, rho: np.ndarray, tol: float | None) -> None:
    tol = default_tol() if tol is None else tol
    leak = np.trace(symmetric_projector(d, 2) @ rho).real
    if leak > tol:
        raise ValueError(f"test state has symmetric weight {leak:.3e}")


def comparator_ppovm(d: int, rho_test: np.ndarray, tol: float | None = None) -> Ppovm:
    """Optimal comparator {M_diff, M_0} = {rho^T (x) P_sym, rho^T (x) P_asym} on parties (12)(34)."""
    _check_antisymmetric(d, rho_test, tol)
    ps, pa = symmetric_projector(d, 2), antisymmetric_projector(d, 2)
    rt = np.asarray(rho_test).T
    return Ppovm(d * d, [np.kron(rt, ps), np.kron(rt, pa)], np.asarray(rho_test), ("diff", "?"))


def comparator_conditional(u: np.ndarray, v: np.ndarray, rho_test: np.ndarray,
                           symmetric: bool = False) -> float:
    """Probability of the 'different' click for channels U, V on the test state.

    With symmetric=True the test state is assumed symmetric and 'different' is the
    antisymmetric projection instead.
    """
    d = u.shape[0]
    w = np.kron(u, v)
    out = w @ rho_test @ dag(w)
    proj = antisymmetric_projector(d, 2) if symmetric else symmetric_projector(d, 2)
    return float(np.trace(proj @ out).real)


def comparator_average(d: int) -> float:
    return (d + 1) / (2 * d)


def symmetric_test_average(d: int) -> float:
    return (d - 1) / (2 * d)


def validate_comparator(p: Ppovm, d: int, tol: float | None = None) -> bool:
    """No-error conditions: M_same (if labeled 'same') vanishes and M_diff is orthogonal to omega_T."""
    tol = default_tol() if tol is None else tol
    wt = twirl_choi_closed(d)
    for lab, m in zip(p.labels, p.elements):
        if lab == "same" and np.trace(m).real > tol:
            return False
        if lab == "diff" and abs(np.trace(wt @ m)) > tol:
            return False
    return bool(validate_ppovm(p, tol))
