"""Unambiguous identification with finite-dimensional systems.

Parties are ordered unknown (A) first, then the reference systems R_1..R_M
(B, C, ... for M = 2). Each system holds one copy unless a UiConfig says otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .operators import (
    Povm,
    antisymmetric_projector,
    basis,
    hermitize,
    kron,
    min_eig,
    permute_subsystems,
    proj,
    symmetric_projector,
)

SINGLET = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
TRIPLET0 = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2)


class PositivityError(ValueError):
    """Inconclusive effect is not positive; carries the offending eigenvalue."""

    def __init__(self, message: str, eigenvalue: float):
        super().__init__(message)
        self.eigenvalue = eigenvalue


@dataclass(frozen=True)
class UiConfig:
    """M reference types, copy numbers (n_A, n_1..n_M), dimension d and priors."""
    M: int
    n_A: int
    n_refs: tuple[int, ...]
    d: int
    etas: tuple[float, ...] = ()

    def __post_init__(self):
        if len(self.n_refs) != self.M:
            raise ValueError("need one copy count per reference")
        if self.n_A < 1 or min(self.n_refs) < 1:
            raise ValueError("copy counts must be positive")
        etas = self.etas or tuple([1.0 / self.M] * self.M)
        if len(etas) != self.M or abs(sum(etas) - 1) > 1e-12:
            raise ValueError("priors must be M numbers summing to 1")
        object.__setattr__(self, "etas", tuple(etas))

    @property
    def parties(self) -> int:
        return self.n_A + sum(self.n_refs)

    def groups(self) -> list[list[int]]:
        """Party indices of A, R_1, ..., R_M."""
        out = [list(range(self.n_A))]
        start = self.n_A
        for n in self.n_refs:
            out.append(list(range(start, start + n)))
            start += n
        return out


@dataclass(frozen=True)
class UiMeasurement:
    """Effects E_1..E_M then E_0, on one copy each of A and M references."""
    povm: Povm
    M: int
    d: int
    etas: tuple[float, ...]
    name: str = ""
    info: dict = field(default_factory=dict)

    def signal(self, refs: Sequence[np.ndarray], i: int) -> np.ndarray:
        """|Psi_i> = psi_i (unknown) ⊗ psi_1 ⊗ ... ⊗ psi_M, with 0-based i."""
        return kron(refs[i], *refs)

    def click_matrix(self, refs: Sequence[np.ndarray]) -> np.ndarray:
        """Entry [i, j] = <Psi_j| E_i |Psi_j> for conclusive effects i."""
        sig = [self.signal(refs, j) for j in range(self.M)]
        return np.array([[np.vdot(s, e @ s).real for s in sig] for e in self.povm.effects[:self.M]])

    def identification_prob(self, refs: Sequence[np.ndarray]) -> float:
        c = self.click_matrix(refs)
        return float(sum(self.etas[i] * c[i, i] for i in range(self.M)))

    def no_error_residual(self, refs: Sequence[np.ndarray]) -> float:
        c = self.click_matrix(refs)
        off = c - np.diag(np.diag(c))
        return float(np.abs(off).max())


def _embed_groups(blocks: Sequence[tuple[np.ndarray, list[int]]], d: int, total: int) -> np.ndarray:
    """Tensor operators acting on listed party groups into natural party order."""
    layout = [p for _, g in blocks for p in g]
    op = kron(*[b for b, _ in blocks])
    order = [layout.index(j) for j in range(total)]
    return permute_subsystems(op, order, [d] * total)


def _sub_sym(d: int, k: int, d_s: int) -> np.ndarray:
    """Projector onto the symmetric subspace of (span of the first d_s basis vectors)^k."""
    ps = np.diag([1.0] * d_s + [0.0] * (d - d_s)).astype(complex)
    sub = kron(*([ps] * k))
    return sub @ symmetric_projector(d, k) @ sub


def ui_average_states(cfg: UiConfig, d_s: int | None = None) -> list[np.ndarray]:
    """Average signal states when references are uniform over a d_s-dimensional subspace."""
    d_s = cfg.d if d_s is None else d_s
    if not 1 <= d_s <= cfg.d:
        raise ValueError("subspace dimension must lie in [1, d]")
    groups = cfg.groups()
    out = []
    for i in range(cfg.M):
        merged = groups[0] + groups[i + 1]
        blocks = [(_sub_sym(cfg.d, len(merged), d_s), merged)]
        for j in range(cfg.M):
            if j != i:
                blocks.append((_sub_sym(cfg.d, len(groups[j + 1]), d_s), groups[j + 1]))
        norm = math.prod(math.comb(len(g) + d_s - 1, d_s - 1) for _, g in blocks)
        out.append(_embed_groups(blocks, cfg.d, cfg.parties) / norm)
    return out


def bergou_hillery_coefficients(eta1: float) -> tuple[float, float, str]:
    """Weights (a, b) of E_1 = a P_AC^asym ⊗ I_B, E_2 = b P_AB^asym ⊗ I_C and the regime."""
    if not 0.0 <= eta1 <= 1.0:
        raise ValueError("eta1 must lie in [0, 1]")
    if eta1 < 0.2:
        return 0.0, 1.0, "left-projective"
    if eta1 > 0.8:
        return 1.0, 0.0, "right-projective"
    lam = (2.0 / 3.0) * (2.0 - np.sqrt((1 - eta1) / eta1))
    return lam, (4 - 4 * lam) / (4 - 3 * lam), "povm"


def _pair_asym(d: int, pair: Sequence[int], total: int = 3) -> np.ndarray:
    return antisymmetric_projector(d, 2, list(pair), total)


def bergou_hillery(eta1: float) -> UiMeasurement:
    """Optimal qubit identification with one copy of the unknown and each reference."""
    a, b, regime = bergou_hillery_coefficients(eta1)
    e1 = a * _pair_asym(2, (0, 2))
    e2 = b * _pair_asym(2, (0, 1))
    e0 = np.eye(8) - e1 - e2
    povm = Povm((e1, e2, hermitize(e0)), ("1", "2", "?"))
    rho1, rho2 = ui_average_states(UiConfig(2, 1, (1, 1), 2, (eta1, 1 - eta1)))
    mean = eta1 * np.trace(e1 @ rho1).real + (1 - eta1) * np.trace(e2 @ rho2).real
    return UiMeasurement(povm, 2, 2, (eta1, 1 - eta1), "bergou-hillery",
                         {"regime": regime, "coefficients": (a, b), "mean": float(mean)})


def bergou_hillery_mean(eta1: float) -> float:
    """Closed-form mean identification probability in the two projective regimes and at 1/2."""
    a, b, _ = bergou_hillery_coefficients(eta1)
    return (eta1 * a + (1 - eta1) * b) / 4.0


def swap_block_matrices(c1: float, c2: float) -> tuple[np.ndarray, np.ndarray]:
    """The 3x3 and 6x6 diagonal blocks of the swap-based inconclusive effect."""
    h1, h2 = c1 / 2, c2 / 2
    q3 = np.array([[1 - h1, 0, h1],
                   [0, 1 - h2, h2],
                   [h1, h2, 1 - h1 - h2]])
    x = 1 - h1 - h2
    q6 = np.array([[x, h1, 0, 0, 0, h2],
                   [h1, x, h2, 0, 0, 0],
                   [0, h2, x, h1, 0, 0],
                   [0, 0, h1, x, h2, 0],
                   [0, 0, 0, h2, x, h1],
                   [h2, 0, 0, 0, h1, x]])
    return q3, q6


def swap_block_eigenvalues(c1: float, c2: float) -> dict[int, np.ndarray]:
    """Closed-form eigenvalues of the 1x1, 3x3 and 6x6 blocks (sorted ascending)."""
    r = np.sqrt(c1**2 - c1 * c2 + c2**2)
    s = 2 - c1 - c2
    e3 = [1.0, (s + r) / 2, (s - r) / 2]
    e6 = [1.0, 1 - c1 - c2, (s + r) / 2, (s + r) / 2, (s - r) / 2, (s - r) / 2]
    return {1: np.array([1.0]), 3: np.sort(e3), 6: np.sort(e6)}


def swap_min_eigenvalue(d: int, c1: float, c2: float) -> float:
    """Smallest eigenvalue of the swap-based inconclusive effect from the block formulas."""
    ev = swap_block_eigenvalues(c1, c2)
    vals = list(ev[1]) + list(ev[3])
    if d > 2:
        vals += list(ev[6])
    return float(min(vals))


def swap_based_effects(d: int, c1: float, c2: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    e1 = c1 * _pair_asym(d, (0, 2))
    e2 = c2 * _pair_asym(d, (0, 1))
    return e1, e2, hermitize(np.eye(d**3) - e1 - e2)


def swap_based(d: int, c1: float, c2: float, eta1: float = 0.5, tol: float = 1e-10) -> UiMeasurement:
    """Swap-based identification E_1 = c1 I_B ⊗ P_AC^asym, E_2 = c2 I_C ⊗ P_AB^asym.

    Raises PositivityError when E_0 is not positive; the block-formula and dense
    eigenvalues are both computed and must agree.
    """
    if c1 < 0 or c2 < 0:
        raise ValueError("c1 and c2 must be nonnegative")
    e1, e2, e0 = swap_based_effects(d, c1, c2)
    closed = swap_min_eigenvalue(d, c1, c2)
    dense = min_eig(e0)
    if abs(closed - dense) > 1e-9:
        raise AssertionError(f"block eigenvalue {closed} disagrees with dense {dense}")
    if closed < -tol:
        bad = 1 - c1 - c2 if d > 2 else closed
        raise PositivityError(f"E0 not positive for c1={c1}, c2={c2}: eigenvalue {bad:.6g}", bad)
    povm = Povm((e1, e2, e0), ("1", "2", "?"))
    return UiMeasurement(povm, 2, d, (eta1, 1 - eta1), "swap-based",
                         {"c": (c1, c2), "min_eigenvalue": closed})


def swap_based_prob(c1: float, c2: float, x, eta1: float = 0.5):
    return (eta1 * c1 + (1 - eta1) * c2) / 2.0 * (1.0 - np.asarray(x, dtype=float))


def hayashi_weight_operator(d: int) -> np.ndarray:
    """e = 2/3 on the mixed-symmetry part and 1/2 on the totally antisymmetric part."""
    ps = symmetric_projector(d, 3)
    pa = antisymmetric_projector(d, 3) if d >= 3 else np.zeros((d**3, d**3), dtype=complex)
    return (2.0 / 3.0) * (np.eye(d**3) - ps - pa) + 0.5 * pa


def hayashi_optimal(d: int) -> UiMeasurement:
    """Optimal universal identification of qudits at equal priors (one copy each)."""
    if d < 2:
        raise ValueError("d must be at least 2")
    e = hayashi_weight_operator(d)
    e1 = hermitize(e @ _pair_asym(d, (0, 2)))
    e2 = hermitize(e @ _pair_asym(d, (0, 1)))
    povm = Povm((e1, e2, hermitize(np.eye(d**3) - e1 - e2)), ("1", "2", "?"))
    return UiMeasurement(povm, 2, d, (0.5, 0.5), "hayashi",
                         {"mean": (d - 1) / (3.0 * d)})


def hayashi_prob(x):
    return (1.0 - np.asarray(x, dtype=float)) / 3.0


def _antisym_vector(d: int) -> np.ndarray:
    """Normalized totally antisymmetric vector of d qudits."""
    import itertools

    from .operators import _perm_sign

    v = np.zeros(d**d, dtype=complex)
    for perm in itertools.permutations(range(d)):
        idx = 0
        for p in perm:
            idx = idx * d + p
        v[idx] = _perm_sign(perm)
    return v / np.linalg.norm(v)


def zhang_ying(d: int, M: int | None = None) -> UiMeasurement:
    """E_i = (1/M) I on reference i ⊗ |phi><phi| on the unknown and the other references.

    |phi> is the unique antisymmetric vector of M = d qudits. A conclusive click i
    is impossible when the unknown equals some reference j != i.
    """
    M = d if M is None else M
    if M != d:
        raise ValueError("only the case M = d is supported")
    phi = proj(_antisym_vector(d))
    total = M + 1
    effects = []
    for i in range(M):
        ref = 1 + i
        rest = [0] + [1 + j for j in range(M) if j != i]
        effects.append(_embed_groups([(phi, rest), (np.eye(d, dtype=complex), [ref])], d, total) / M)
    e0 = hermitize(np.eye(d**total) - sum(effects))
    povm = Povm(tuple(effects) + (e0,), tuple(str(i + 1) for i in range(M)) + ("?",))
    return UiMeasurement(povm, M, d, tuple([1.0 / M] * M), "zhang-ying")


def equatorial_average_states() -> tuple[np.ndarray, np.ndarray]:
    """Average signal states for references drawn uniformly from the qubit equator."""
    core = proj([1, 0, 0, 0]) + proj([0, 0, 0, 1]) + 2 * proj(TRIPLET0)
    i2 = np.eye(2, dtype=complex)
    rho1 = _embed_groups([(core, [0, 1]), (i2, [2])], 2, 3) / 8
    rho2 = _embed_groups([(core, [0, 2]), (i2, [1])], 2, 3) / 8
    return rho1, rho2


def equatorial_zero_vectors() -> tuple[list[np.ndarray], list[np.ndarray]]:
    """a_i = |i>_B ⊗ singlet_AC (killed by rho2), b_i = |i>_C ⊗ singlet_AB (killed by rho1)."""
    a = [permute_subsystems_vec(np.kron(SINGLET, basis(2, i)), [0, 2, 1]) for i in range(2)]
    b = [np.kron(SINGLET, basis(2, i)) for i in range(2)]
    return a, b


def permute_subsystems_vec(v: np.ndarray, layout: Sequence[int], d: int = 2) -> np.ndarray:
    """Reorder a vector whose factor j holds party layout[j] into natural party order."""
    n = len(layout)
    order = [list(layout).index(j) for j in range(n)]
    return np.transpose(np.asarray(v).reshape([d] * n), order).ravel()


def equatorial_state(phi: float) -> np.ndarray:
    return np.array([1.0, np.exp(1j * phi)]) / np.sqrt(2)
