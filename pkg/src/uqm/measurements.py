"""Unambiguous comparison of sharp non-degenerate observables.

Parties are 0-based: the first two slots are the two uses of apparatus A, the last
two the uses of B. An observable is given by the unitary whose columns are its
eigenbasis.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .operators import (collective_twirl, dag, default_tol, intersection_projector, kron,
                        permute_vector, projector_basis, rank, symmetric_dim, symmetric_projector,
                        antisymmetric_projector)


@dataclass(frozen=True)
class SharpObservable:
    d: int
    projectors: tuple

    @classmethod
    def from_unitary(cls, u: np.ndarray) -> "SharpObservable":
        u = np.asarray(u, dtype=complex)
        return cls(u.shape[0], tuple(np.outer(u[:, j], u[:, j].conj()) for j in range(u.shape[0])))

    def same(self) -> np.ndarray:
        return sum(np.kron(p, p) for p in self.projectors)

    def diff(self) -> np.ndarray:
        return sum(np.kron(p, q) for p, q in itertools.permutations(self.projectors, 2))


def _check_antisymmetric(d: int, rho: np.ndarray, tol: float | None) -> None:
    tol = default_tol() if tol is None else tol
    leak = np.trace(symmetric_projector(d, 2) @ rho).real
    if leak > tol:
        raise ValueError(f"test state has symmetric weight {leak:.3e}")


@dataclass(frozen=True)
class LabeledComparison:
    d: int
    rho: np.ndarray
    average: float

    def q_same(self, a: SharpObservable, b: SharpObservable) -> float:
        """Probability of equal outcomes; unambiguously signals A != B."""
        return float(sum(np.trace(self.rho @ np.kron(p, q)).real
                         for p, q in zip(a.projectors, b.projectors)))


def labeled_compare(d: int, rho_test: np.ndarray | None = None, tol: float | None = None) -> LabeledComparison:
    """Single-shot comparison of labeled observables with an antisymmetric test state."""
    if rho_test is None:
        pa = antisymmetric_projector(d, 2)
        rho_test = pa / np.trace(pa).real
    _check_antisymmetric(d, rho_test, tol)
    return LabeledComparison(d, np.asarray(rho_test), 1.0 / d)


@dataclass(frozen=True)
class IdentityReport:
    d: int
    q_jj_diff: np.ndarray
    q_jk_diff: np.ndarray
    q_jj_same: np.ndarray
    q_jk_same: np.ndarray
    diff_class_operator: np.ndarray
    diff_class_eigenvalues: np.ndarray
    holds: bool


def identity_not_concludable(d: int) -> IdentityReport:
    """Average outcome operators for labeled observables; equality never excluded by any outcome.

    For A != B every outcome pair has operator I/d^2, which is full rank, so no test
    state can give an outcome impossible under A != B.
    """
    I = np.eye(d * d)
    ps = symmetric_projector(d, 2)
    pa = antisymmetric_projector(d, 2)
    d2 = symmetric_dim(d, 2)
    q_jj_same = ps / d2
    q_jk_same = (I / d - ps / d2) / (d - 1)
    diff_class = (d - 1) * q_jk_same  # = pa/d + (d-1)/(d(d+1)) ps
    ev = np.linalg.eigvalsh(diff_class)
    holds = bool(ev.min() > 0) and np.allclose(diff_class, pa / d + (d - 1) / (d * (d + 1)) * ps)
    return IdentityReport(d, I / d**2, I / d**2, q_jj_same, q_jk_same, diff_class, ev, holds)


CLASSES = ("same", "diff")


def rbar(d: int, x: str) -> np.ndarray:
    """Haar average of a single apparatus used twice, per outcome pair of class x."""
    ps = symmetric_projector(d, 2)
    d2 = symmetric_dim(d, 2)
    if x == "same":
        return ps / d2
    return (np.eye(d * d) / d - ps / d2) / (d - 1)


@dataclass(frozen=True)
class OutcomeClassOperators:
    different: dict
    equal: dict

    def check(self, tol: float = 1e-10) -> bool:
        ok = True
        for ops in (self.different, self.equal):
            ok &= np.allclose(sum(ops.values()), np.eye(16), atol=tol)
            ok &= all(np.linalg.eigvalsh(o).min() > -tol for o in ops.values())
        return bool(ok)


def _class_weight(d: int, x: str) -> int:
    return d if x == "same" else d * (d - 1)


def outcome_operators_different(d: int) -> dict:
    return {(x, y): _class_weight(d, x) * _class_weight(d, y) * np.kron(rbar(d, x), rbar(d, y))
            for x in CLASSES for y in CLASSES}


def outcome_operators_equal(d: int) -> dict:
    """Exact Haar averages of A_x (x) A_y over a common random basis (four-fold collective twirl)."""
    ref = SharpObservable.from_unitary(np.eye(d))
    ops = {"same": ref.same(), "diff": ref.diff()}
    return {(x, y): collective_twirl(np.kron(ops[x], ops[y]), d, 4).real.astype(complex)
            for x in CLASSES for y in CLASSES}


def build_outcome_operators(d: int = 2) -> OutcomeClassOperators:
    if d != 2:
        raise NotImplementedError("closed outcome-class constructions are available for qubits only")
    return OutcomeClassOperators(outcome_operators_different(d), outcome_operators_equal(d))


def _p(parties, total=4, d=2, asym=False):
    f = antisymmetric_projector if asym else symmetric_projector
    return f(d, len(parties), list(parties), total)


def r_operator(pair: tuple, other: tuple) -> np.ndarray:
    """R_{pair-other} = int psi^{(x)2} on `pair` (x) (I - psi)^{(x)2} on `other`, qubits."""
    a, b = pair
    c, e = other
    return (_p((a, b)) / 3 + _p((0, 1, 2, 3)) / 5
            - (_p((a, b, c)) + _p((a, b, e))) / 4)


def equal_operators_closed() -> dict:
    """Qubit outcome operators for A = B assembled from symmetric projectors."""
    p1234 = _p((0, 1, 2, 3))
    ss = 2 * (p1234 / 5 + r_operator((0, 1), (2, 3)) @ _p((2, 3)))
    sd = 2 * ((_p((0, 1, 2)) + _p((0, 1, 3))) / 4 - 2 * p1234 / 5)
    ds = 2 * ((_p((0, 2, 3)) + _p((1, 2, 3))) / 4 - 2 * p1234 / 5)
    dd = 2 * (r_operator((0, 2), (1, 3)) @ _p((1, 3)) + r_operator((0, 3), (1, 2)) @ _p((1, 2)))
    return {("same", "same"): ss, ("same", "diff"): sd, ("diff", "same"): ds, ("diff", "diff"): dd}


def _place(factors: list[tuple[np.ndarray, tuple]], total: int = 4, d: int = 2) -> np.ndarray:
    """Tensor two-party vectors onto the given party pairs."""
    v = factors[0][0]
    parties = list(factors[0][1])
    for vec, ps in factors[1:]:
        v = np.kron(v, vec)
        parties += list(ps)
    return permute_vector(v, list(np.argsort(parties)), [d] * total)


SINGLET = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)


def phi_plus(j: int, k: int, sign: int = 1) -> np.ndarray:
    """(|jk> + sign |kj>)/sqrt 2 for j < k, |jj> for j = k (qubits)."""
    e = np.eye(2)
    if j == k:
        return np.kron(e[j], e[j]).astype(complex)
    return (np.kron(e[j], e[k]) + sign * np.kron(e[k], e[j])) / np.sqrt(2)


def unlabeled_test_state() -> np.ndarray:
    v = _place([(SINGLET, (0, 2)), (SINGLET, (1, 3))]) + _place([(SINGLET, (0, 3)), (SINGLET, (1, 2))])
    return v / np.sqrt(3)


def unlabeled_pair_operators(psi_basis: np.ndarray, phi_basis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(O_same,diff, O_diff,same) for fixed unlabeled qubit observables."""
    a = SharpObservable.from_unitary(psi_basis)
    b = SharpObservable.from_unitary(phi_basis)
    return np.kron(a.same(), b.diff()), np.kron(a.diff(), b.same())


def unlabeled_success(psi_basis: np.ndarray, phi_basis: np.ndarray) -> float:
    """Probability that the two-shot test reveals the difference; classes (same,diff), (diff,same)."""
    v = unlabeled_test_state()
    sd, ds = unlabeled_pair_operators(psi_basis, phi_basis)
    return float((v.conj() @ (sd + ds) @ v).real)


def unlabeled_success_closed(theta):
    return 2.0 / 3.0 * np.sin(2 * np.asarray(theta, dtype=float)) ** 2


def unlabeled_compare(d: int):
    if d != 2:
        raise NotImplementedError(
            "two-shot unlabeled comparison beyond qubits is unresolved; only d = 2 is supported")
    return unlabeled_test_state(), 4.0 / 9.0


def kappa_vectors() -> list[np.ndarray]:
    pp = phi_plus(0, 1)
    e = np.eye(2)
    k1 = (np.kron(phi_plus(0, 0), pp) - np.kron(pp, phi_plus(0, 0))) / np.sqrt(2)
    k2 = (np.kron(np.kron(e[0], e[0]), np.kron(e[1], e[1]))
          - np.kron(np.kron(e[1], e[1]), np.kron(e[0], e[0]))) / np.sqrt(2)
    k3 = (np.kron(phi_plus(1, 1), pp) - np.kron(pp, phi_plus(1, 1))) / np.sqrt(2)
    return [k1.astype(complex), k2.astype(complex), k3.astype(complex)]


def diffdiff_strategy() -> tuple[list[np.ndarray], float]:
    ks = kappa_vectors()
    o = outcome_operators_different(2)[("diff", "diff")]
    vals = [float((k.conj() @ o @ k).real) for k in ks]
    return ks, float(np.mean(vals))


def unlabeled_detection(eta_a: float, theta_ab: float) -> float:
    if not 0.0 <= theta_ab <= np.pi:
        raise ValueError("angle must lie in [0, pi]")
    return float(eta_a * np.sin(theta_ab) ** 2)


def omega_vectors() -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Unnormalized bases of Q_123 and Q_124 on four qubits."""
    m = phi_plus(0, 1, -1)
    w, wp = [], []
    for j in (0, 1):
        pj = phi_plus(j, j)
        w.append(_place([(pj, (0, 1)), (m, (2, 3))]) + _place([(pj, (0, 2)), (m, (1, 3))])
                 + _place([(pj, (1, 2)), (m, (0, 3))]))
        wp.append(-_place([(pj, (0, 1)), (m, (2, 3))]) + _place([(pj, (0, 3)), (m, (1, 2))])
                  + _place([(pj, (1, 3)), (m, (0, 2))]))
    mid = np.kron(phi_plus(0, 0), phi_plus(1, 1)) - np.kron(phi_plus(1, 1), phi_plus(0, 0))
    w.insert(1, mid + 2 * np.kron(phi_plus(0, 1), m))
    wp.insert(1, mid - 2 * np.kron(phi_plus(0, 1), m))
    return w, wp


@dataclass
class AuditReport:
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def appendix_e_audit(tol: float = 1e-10) -> AuditReport:
    """Numerical audit of the four-qubit subspace relations behind the unlabeled strategy."""
    r = AuditReport()
    p12, p34 = _p((0, 1)), _p((2, 3))
    p123, p124, p1234 = _p((0, 1, 2)), _p((0, 1, 3)), _p((0, 1, 2, 3))
    q = p123 + p124 - 2 * p1234
    ev = np.sort(np.linalg.eigvalsh(q))
    r.checks["spectrum"] = bool(np.allclose(ev[-6:-3], 2 / 3, atol=tol) and np.allclose(ev[-3:], 4 / 3, atol=tol)
                                and np.allclose(ev[:-6], 0, atol=tol))
    r.checks["dim_sym4_is_5"] = rank(p1234) == 5
    q12p = p12 @ p34 - p1234
    r.checks["dim_Q12plus_is_4"] = rank(q12p) == 4
    ks = kappa_vectors()
    kmat = np.array(ks).T
    r.checks["kappa_orthonormal"] = bool(np.allclose(dag(kmat) @ kmat, np.eye(3), atol=tol))
    r.checks["dim_kappa_span_is_3"] = rank(kmat @ dag(kmat)) == 3
    r.checks["kappa_in_Q12plus"] = bool(np.allclose(q12p @ kmat, kmat, atol=tol))
    p13_24 = _p((0, 2)) @ _p((1, 3))
    p14_23 = _p((0, 3)) @ _p((1, 2))
    r.checks["kappa_no_error"] = bool(abs(np.trace(dag(kmat) @ (p13_24 + p14_23) @ kmat)) < tol)
    w, wp = omega_vectors()
    gram = np.array([[wj.conj() @ wk for wk in wp] for wj in w])
    r.checks["omega_cross_products"] = bool(np.allclose(gram, -2 * np.eye(3), atol=tol))
    r.checks["omega_norms"] = bool(np.allclose([x.conj() @ x for x in w + wp], 6, atol=tol))
    r.checks["omega_in_Q123"] = bool(all(np.allclose((p123 - p1234) @ x, x, atol=tol) for x in w))
    r.checks["omegap_in_Q124"] = bool(all(np.allclose((p124 - p1234) @ x, x, atol=tol) for x in wp))
    joint = intersection_projector(p123, p124)
    r.checks["joint_subspace_is_sym4"] = bool(np.allclose(joint, p1234, atol=1e-7))
    # the kernel of P123 + P124 inside P12sym (x) P34sym is one-dimensional and spanned by phi_Q
    basis = projector_basis(p12 @ p34)
    restricted = dag(basis) @ (p123 + p124) @ basis
    evr, vecr = np.linalg.eigh(restricted)
    kernel = vecr[:, evr < 1e-9]
    r.checks["phiQ_unique"] = kernel.shape[1] == 1
    if kernel.shape[1] == 1:
        v = basis @ kernel[:, 0]
        r.checks["phiQ_matches"] = bool(abs(abs(v.conj() @ unlabeled_test_state()) - 1) < 1e-9)
    return r


def unlabeled_single_use_probs(rho: np.ndarray, a: SharpObservable, b: SharpObservable) -> np.ndarray:
    """p_{j,a} averaged over independent relabelings of both apparatuses."""
    d = a.d
    out = np.zeros((d, d))
    perms = list(itertools.permutations(range(d)))
    for j in range(d):
        for k in range(d):
            acc = 0.0
            for p in perms:
                for q in perms:
                    acc += np.trace(rho @ np.kron(a.projectors[p[j]], b.projectors[q[k]])).real
            out[j, k] = acc / len(perms) ** 2
    return out


def unlabeled_two_shot_prob(rho: np.ndarray, a: SharpObservable, b: SharpObservable,
                            j: int, k: int, x: int, y: int) -> float:
    """p_{jk,xy} for two uses of each apparatus, averaged over relabelings."""
    perms = list(itertools.permutations(range(a.d)))
    acc = 0.0
    for p in perms:
        for q in perms:
            op = kron(a.projectors[p[j]], a.projectors[p[k]], b.projectors[q[x]], b.projectors[q[y]])
            acc += np.trace(rho @ op).real
    return float(acc / len(perms) ** 2)
