"""Unambiguous comparison of pure-state ensembles and of finite state sets."""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .operators import (
    EmptySubspaceWarning,
    Povm,
    proj,
    symmetric_dim,
    symmetric_projector,
)


def binom(n: int, m: int) -> float:
    """Binomial coefficient; exact integers up to n = 60, log-gamma above."""
    if m < 0 or m > n:
        return 0.0
    if n <= 60:
        return float(math.comb(n, m))
    return float(np.exp(gammaln(n + 1) - gammaln(m + 1) - gammaln(n - m + 1)))


@dataclass(frozen=True)
class ComparisonConfig:
    d: int
    k: int
    l: int
    eta_diff: float = 1.0

    def __post_init__(self):
        if self.k < 1 or self.l < 1 or self.d < 1:
            raise ValueError("d, k and l must be positive")
        if not 0.0 < self.eta_diff <= 1.0:
            raise ValueError("eta_diff must lie in (0, 1]")


def compare_coefficients(k: int, l: int) -> np.ndarray:
    """Coefficients c_m with P = 1 - sum_m c_m x^m."""
    norm = binom(k + l, k)
    return np.array([binom(k, m) * binom(l, m) / norm for m in range(min(k, l) + 1)])


def compare_prob_pure(k: int, l: int, x):
    """Success probability of the optimal comparison of psi1^k against psi2^l, x = |<psi1|psi2>|^2."""
    x = np.asarray(x, dtype=float)
    if np.any((x < -1e-15) | (x > 1 + 1e-15)):
        raise ValueError("x must lie in [0, 1]")
    c = compare_coefficients(k, l)
    out = 1.0 - np.polynomial.polynomial.polyval(x, c)
    return float(out) if out.ndim == 0 else out


def compare_avg_success(cfg: ComparisonConfig) -> float:
    """Haar average of the comparison success, from symmetric-subspace dimensions."""
    d, k, l = cfg.d, cfg.k, cfg.l
    if k + l > 60:
        ratio = np.exp(
            _log_sym_dim(d, k + l) - _log_sym_dim(d, k) - _log_sym_dim(d, l))
    else:
        ratio = symmetric_dim(d, k + l) / (symmetric_dim(d, k) * symmetric_dim(d, l))
    return cfg.eta_diff * (1.0 - ratio)


def _log_sym_dim(d: int, k: int) -> float:
    return float(gammaln(d + k) - gammaln(d) - gammaln(k + 1))


def comparison_povm(d: int, k: int, l: int) -> Povm:
    """E_same = 0, E_diff = I - P_sym, E_? = P_sym on k + l copies."""
    n = k + l
    psym = symmetric_projector(d, n)
    dim = d**n
    return Povm((np.zeros((dim, dim), dtype=complex), np.eye(dim) - psym, psym),
                ("same", "different", "?"))


def delta_coefficients(k: int, l: int) -> np.ndarray:
    """Coefficients of P(k+1, l, x) - P(k, l, x) as a polynomial in x."""
    a = compare_coefficients(k, l)
    b = compare_coefficients(k + 1, l)
    n = max(len(a), len(b))
    a = np.pad(a, (0, n - len(a)))
    b = np.pad(b, (0, n - len(b)))
    return a - b


def coherent_compare_prob(k: int, l: int, x):
    """Comparison success restricted to coherent states, x = |<alpha|beta>|^2."""
    return 1.0 - np.asarray(x, dtype=float) ** (k * l / (k + l))


def gram_matrix(states: Sequence[np.ndarray]) -> np.ndarray:
    v = np.stack([np.asarray(s, dtype=complex).ravel() for s in states], axis=1)
    return v.conj().T @ v


def permanent(a: np.ndarray) -> complex:
    """Exact permanent by Ryser's formula with Gray-code updates (n <= 10)."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    if n > 10:
        raise ValueError("exact permanent limited to n <= 10")
    if n == 0:
        return 1.0 + 0j
    total = 0j
    row_sums = np.zeros(n, dtype=complex)
    gray_prev = 0
    for i in range(1, 2**n):
        gray = i ^ (i >> 1)
        changed = gray ^ gray_prev
        j = changed.bit_length() - 1
        if gray & changed:
            row_sums += a[:, j]
        else:
            row_sums -= a[:, j]
        gray_prev = gray
        bits = bin(gray).count("1")
        total += (-1) ** bits * np.prod(row_sums)
    return (-1) ** n * total


def permanent_bruteforce(a: np.ndarray) -> complex:
    n = a.shape[0]
    return sum(np.prod([a[i, p[i]] for i in range(n)]) for p in itertools.permutations(range(n)))


def difference_detect_prob(states: Sequence[np.ndarray]) -> float:
    """Probability of certifying that not all n systems are identical: 1 - per(G)/n!."""
    n = len(states)
    if n < 2:
        raise ValueError("need at least two states")
    if n > 10:
        raise ValueError("exact permanent limited to n <= 10")
    return float(1.0 - permanent(gram_matrix(states)).real / math.factorial(n))


def all_different_prob(states: Sequence[np.ndarray]) -> float:
    """Probability of certifying that all n states differ pairwise: det(G)/n!."""
    n = len(states)
    d = np.asarray(states[0]).size
    if n > d:
        warnings.warn("antisymmetric subspace is empty for n > d", EmptySubspaceWarning, stacklevel=2)
        return 0.0
    return float(max(np.linalg.det(gram_matrix(states)).real, 0.0) / math.factorial(n))


def identity_confirmable(states: Sequence[np.ndarray], tol: float = 1e-9) -> bool:
    """Identity of two draws can be confirmed unambiguously only for linearly independent sets."""
    s = np.linalg.svd(np.stack([np.ravel(v) for v in states], axis=1), compute_uv=False)
    return bool(s[-1] > tol * s[0]) and len(states) <= np.ravel(states[0]).size


def finite_set_comparison_states(q1: float, q2: float, phi1: np.ndarray, phi2: np.ndarray):
    """Two-state set {phi1, phi2} drawn with probabilities q1, q2, compared pairwise.

    Returns (rho_same, rho_diff, eta_same, eta_diff) on the two-copy space.
    """
    if abs(q1 + q2 - 1.0) > 1e-12:
        raise ValueError("q1 + q2 must equal 1")
    phi1 = np.asarray(phi1, dtype=complex).ravel()
    phi2 = np.asarray(phi2, dtype=complex).ravel()
    eta1 = q1**2 + q2**2
    eta2 = 2 * q1 * q2
    rho1 = (q1**2 * proj(np.kron(phi1, phi1)) + q2**2 * proj(np.kron(phi2, phi2))) / eta1
    rho2 = 0.5 * proj(np.kron(phi1, phi2)) + 0.5 * proj(np.kron(phi2, phi1))
    return rho1, rho2, eta1, eta2
