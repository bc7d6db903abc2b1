"""Unambiguous discrimination of two states.

Pure-state optimum, the three reduction theorems (common subspace, orthogonal
parts, block diagonal), optimality conditions for proper measurements, the
fidelity bound and subspace discrimination in a Jordan basis.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .operators import (
    Povm,
    dag,
    default_tol,
    hermitize,
    intersection_projector,
    kernel_projector,
    min_eig,
    pinv_on_support,
    proj,
    projector_basis,
    psd_sqrt,
    rank,
    support_projector,
)

COMMON_COS = 1.0 - 1e-8
ORTHO_COS = 1e-8

REGIMES = ("left-projective", "povm", "right-projective", "composite")


@dataclass(frozen=True)
class UsdProblem:
    """Two density operators with prior eta1 for the first one."""
    rho1: np.ndarray
    rho2: np.ndarray
    eta1: float

    def __post_init__(self):
        r1 = np.asarray(self.rho1, dtype=complex)
        r2 = np.asarray(self.rho2, dtype=complex)
        if r1.ndim == 1:
            r1 = proj(r1)
        if r2.ndim == 1:
            r2 = proj(r2)
        if r1.shape != r2.shape:
            raise ValueError("states act on different dimensions")
        if not 0.0 <= self.eta1 <= 1.0:
            raise ValueError("eta1 must lie in [0, 1]")
        object.__setattr__(self, "rho1", r1)
        object.__setattr__(self, "rho2", r2)

    @property
    def eta2(self) -> float:
        return 1.0 - self.eta1

    @property
    def dim(self) -> int:
        return self.rho1.shape[0]

    @property
    def gamma1(self) -> np.ndarray:
        return self.eta1 * self.rho1

    @property
    def gamma2(self) -> np.ndarray:
        return self.eta2 * self.rho2

    def success(self, povm: Povm) -> float:
        return float(self.eta1 * np.trace(povm[0] @ self.rho1).real
                     + self.eta2 * np.trace(povm[1] @ self.rho2).real)

    def failure(self, povm: Povm) -> float:
        e0 = povm[2]
        return float(self.eta1 * np.trace(e0 @ self.rho1).real
                     + self.eta2 * np.trace(e0 @ self.rho2).real)

    def errors(self, povm: Povm) -> tuple[float, float]:
        """(Tr E1 rho2, Tr E2 rho1); both vanish for an unambiguous measurement."""
        return (float(np.trace(povm[0] @ self.rho2).real),
                float(np.trace(povm[1] @ self.rho1).real))


@dataclass(frozen=True)
class UsdSolution:
    povm: Povm
    p_discrimination: float
    regime: str

    @property
    def p_failure(self) -> float:
        return 1.0 - self.p_discrimination


def _povm3(e1: np.ndarray, e2: np.ndarray) -> Povm:
    e0 = np.eye(e1.shape[0]) - e1 - e2
    return Povm((hermitize(e1), hermitize(e2), hermitize(e0)), ("1", "2", "?"))


def idp_regime(lam: float, eta1: float) -> str:
    left = lam**2 / (1 + lam**2)
    right = 1.0 / (1 + lam**2)
    if eta1 < left:
        return "left-projective"
    if eta1 > right:
        return "right-projective"
    return "povm"


def idp_success(lam: float, eta1: float) -> float:
    """Optimal success probability for two pure states with overlap modulus lam."""
    eta2 = 1.0 - eta1
    regime = idp_regime(lam, eta1)
    if regime == "left-projective":
        return eta2 * (1 - lam**2)
    if regime == "right-projective":
        return eta1 * (1 - lam**2)
    return 1.0 - 2.0 * np.sqrt(eta1 * eta2) * lam


def idp_optimal(psi1: np.ndarray, psi2: np.ndarray, eta1: float) -> UsdSolution:
    """Optimal unambiguous discrimination of two pure states.

    Effects are built in the span of the two vectors; the inconclusive effect is
    the identity on its orthocomplement.
    """
    psi1 = np.asarray(psi1, dtype=complex).ravel()
    psi2 = np.asarray(psi2, dtype=complex).ravel()
    for v in (psi1, psi2):
        if abs(np.linalg.norm(v) - 1) > 1e-8:
            raise ValueError("input vectors must be normalized")
    if not 0.0 < eta1 < 1.0:
        raise ValueError("eta1 must lie in (0, 1)")
    ov = np.vdot(psi1, psi2)
    lam = abs(ov)
    if lam > 1 - 1e-12:
        raise ValueError("states are identical up to phase; no unambiguous discrimination")
    eta2 = 1.0 - eta1
    # perp1 lies in the span, orthogonal to psi1; perp2 orthogonal to psi2
    perp1 = psi2 - ov * psi1
    perp1 /= np.linalg.norm(perp1)
    perp2 = psi1 - np.conj(ov) * psi2
    perp2 /= np.linalg.norm(perp2)
    regime = idp_regime(lam, eta1)
    if regime == "left-projective":
        c1, c2 = 0.0, 1.0
    elif regime == "right-projective":
        c1, c2 = 1.0, 0.0
    else:
        c1 = (1 - np.sqrt(eta2 / eta1) * lam) / (1 - lam**2)
        c2 = (1 - np.sqrt(eta1 / eta2) * lam) / (1 - lam**2)
        # clip rounding at the borders so the effects stay positive
        c1, c2 = max(c1, 0.0), max(c2, 0.0)
    povm = _povm3(c1 * proj(perp2), c2 * proj(perp1))
    return UsdSolution(povm, idp_success(lam, eta1), regime)


@dataclass(frozen=True)
class JordanPair:
    """Columns of basis_a / basis_b are orthonormal; <a_i|b_j> = delta_ij cosines[i]."""
    basis_a: np.ndarray
    basis_b: np.ndarray
    cosines: np.ndarray


def _check_orthonormal(v: np.ndarray, tol: float = 1e-8):
    g = dag(v) @ v
    if np.linalg.norm(g - np.eye(v.shape[1])) > tol * max(1, v.shape[1]):
        raise ValueError("basis columns are not orthonormal")


def jordan_basis(v1: np.ndarray, v2: np.ndarray) -> JordanPair:
    """Jordan (principal-angle) bases of two subspaces from the SVD of their overlap."""
    v1 = np.atleast_2d(np.asarray(v1, dtype=complex))
    v2 = np.atleast_2d(np.asarray(v2, dtype=complex))
    if v1.shape[0] != v2.shape[0]:
        raise ValueError("subspaces live in different spaces")
    _check_orthonormal(v1)
    _check_orthonormal(v2)
    h = dag(v1) @ v2
    u, s, wh = np.linalg.svd(h, full_matrices=True)
    a = v1 @ u
    b = v2 @ dag(wh)
    # fix the phase of each a_i (b_i follows) so the first sizeable coordinate is real positive
    for i in range(a.shape[1]):
        col = a[:, i]
        j = int(np.argmax(np.abs(col) > 1e-8 * np.abs(col).max()))
        ph = np.conj(col[j]) / abs(col[j])
        a[:, i] *= ph
        if i < min(h.shape):
            b[:, i] *= ph
    for i in range(min(h.shape), b.shape[1]):
        col = b[:, i]
        j = int(np.argmax(np.abs(col) > 1e-8 * np.abs(col).max()))
        b[:, i] *= np.conj(col[j]) / abs(col[j])
    return JordanPair(a, b, np.clip(s, 0.0, 1.0))


@dataclass(frozen=True)
class Reduction:
    """A reduced problem together with the data needed to lift its solution."""
    reduced: UsdProblem | None
    norm: float
    projector: np.ndarray
    extra1: np.ndarray | None = None
    extra2: np.ndarray | None = None

    def lift(self, povm: Povm) -> Povm:
        """Rebuild full-space effects from effects on the reduced problem."""
        pi = self.projector
        e1 = pi @ povm[0] @ pi
        e2 = pi @ povm[1] @ pi
        if self.extra1 is not None:
            e1 = e1 + self.extra1
        if self.extra2 is not None:
            e2 = e2 + self.extra2
        return _povm3(e1, e2)

    def failure(self, q_reduced: float) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class CommonReduction(Reduction):
    def failure(self, q_reduced: float) -> float:
        return 1.0 - self.norm + self.norm * q_reduced


@dataclass(frozen=True)
class OrthogonalReduction(Reduction):
    def failure(self, q_reduced: float) -> float:
        return self.norm * q_reduced


def _restrict(p: UsdProblem, pi: np.ndarray) -> tuple[UsdProblem | None, float]:
    n1 = float(np.trace(pi @ p.rho1).real)
    n2 = float(np.trace(pi @ p.rho2).real)
    n = p.eta1 * n1 + p.eta2 * n2
    if n <= default_tol():
        return None, 0.0
    r1 = pi @ p.rho1 @ pi / n1 if n1 > default_tol() else np.zeros_like(p.rho1)
    r2 = pi @ p.rho2 @ pi / n2 if n2 > default_tol() else np.zeros_like(p.rho2)
    return UsdProblem(r1, r2, p.eta1 * n1 / n), n


def common_subspace_projector(p: UsdProblem, tol: float | None = None) -> np.ndarray:
    return intersection_projector(support_projector(p.rho1, tol), support_projector(p.rho2, tol))


def reduce_common_subspace(p: UsdProblem, tol: float | None = None) -> CommonReduction:
    """Split off the intersection of supports, where only the inconclusive outcome can click."""
    common = common_subspace_projector(p, tol)
    rest = np.eye(p.dim) - common
    reduced, n = _restrict(p, rest)
    return CommonReduction(reduced, n, rest)


def reduce_orthogonal_subspaces(p: UsdProblem, tol: float | None = None) -> OrthogonalReduction:
    """Detach the parts of each support orthogonal to the other state."""
    if np.trace(common_subspace_projector(p, tol)).real > 0.5:
        raise ValueError("supports share a common subspace; reduce it first")
    s1 = support_projector(p.rho1, tol)
    s2 = support_projector(p.rho2, tol)
    # S1perp: in the support of rho2 and the kernel of rho1 -> certain detection of state 2
    s1_perp = intersection_projector(np.eye(p.dim) - s1, s2)
    s2_perp = intersection_projector(np.eye(p.dim) - s2, s1)
    rest = np.eye(p.dim) - s1_perp - s2_perp
    reduced, n = _restrict(p, rest)
    return OrthogonalReduction(reduced, n, rest, extra1=s2_perp, extra2=s1_perp)


@dataclass(frozen=True)
class Block:
    problem: UsdProblem | None
    weight: float
    projector: np.ndarray


def reduce_block_diagonal(p: UsdProblem, blocks: list[np.ndarray],
                          tol: float | None = None) -> list[Block]:
    """Split a block-diagonal pair into independent sub-problems; Q = sum_k N_k Q_k."""
    tol = default_tol() if tol is None else tol
    blocks = [np.asarray(b, dtype=complex) for b in blocks]
    eye = np.eye(p.dim)
    if np.linalg.norm(sum(blocks) - eye) > 1e3 * tol:
        raise ValueError("block projectors do not resolve the identity")
    for b in blocks:
        if np.linalg.norm(b @ b - b) > 1e3 * tol:
            raise ValueError("block is not a projector")
    for rho in (p.rho1, p.rho2):
        bd = sum(b @ rho @ b for b in blocks)
        if np.linalg.norm(bd - rho) > 1e3 * tol:
            raise ValueError("states are not block diagonal in the given blocks")
    out = []
    for b in blocks:
        sub, n = _restrict(p, b)
        out.append(Block(sub, n, b))
    return out


def two_dim_blocks(p: UsdProblem, tol: float = 1e-8) -> list[np.ndarray] | None:
    """Commutator test for a common two-dimensional block structure.

    Returns block projectors (pairs span{a, gamma2 a} plus the joint kernel) when
    the three commutators vanish and the construction verifies, else None.
    """
    g1, g2 = p.gamma1, p.gamma2
    scale = max(np.linalg.norm(g1), np.linalg.norm(g2)) ** 4
    comms = (g1 @ (g1 @ g2 @ g1) - (g1 @ g2 @ g1) @ g1,
             g2 @ (g2 @ g1 @ g1 @ g2) - (g2 @ g1 @ g1 @ g2) @ g2,
             g1 @ (g1 @ g2 @ g2 @ g1) - (g1 @ g2 @ g2 @ g1) @ g1)
    if any(np.linalg.norm(c) > tol * scale for c in comms):
        return None
    s1 = support_projector(g1)
    s2 = support_projector(g2)
    rng = np.random.default_rng(12345)
    t = rng.uniform(0.5, 1.5)
    # joint eigenvectors of g1 and g1 g2 g1 inside supp g1
    w, v = np.linalg.eigh(hermitize(g1 + t * g1 @ g2 @ g1))
    vecs = [v[:, i] for i in range(v.shape[1]) if np.linalg.norm(s1 @ v[:, i]) > 0.5]
    blocks = []
    used = np.zeros((p.dim, p.dim), dtype=complex)
    for a in vecs:
        b = s2 @ a
        cols = [a]
        if np.linalg.norm(b) > tol:
            b = b - np.vdot(a, b) * a
            if np.linalg.norm(b) > tol:
                cols.append(b / np.linalg.norm(b))
        q = np.stack(cols, axis=1)
        blocks.append(q @ dag(q))
        used = used + blocks[-1]
    # remaining directions of supp g2 not reached, then the joint kernel
    rem2 = s2 - used @ s2 @ used
    rem2 = support_projector(hermitize(rem2)) if np.linalg.norm(rem2) > tol else None
    if rem2 is not None:
        for col in projector_basis(rem2).T:
            blocks.append(proj(col))
            used = used + blocks[-1]
    ker = np.eye(p.dim) - used
    if np.trace(ker).real > 0.5:
        blocks.append(hermitize(ker))
    try:
        reduce_block_diagonal(p, blocks, tol=1e-7)
    except ValueError:
        return None
    return blocks


@dataclass(frozen=True)
class ProperReport:
    proper: bool
    identity_residual: float
    unambiguity_residual: float


def is_proper_usd(povm: Povm, p: UsdProblem, tol: float | None = None) -> ProperReport:
    """E0 is identity off the joint support and gamma1 (I - E0) gamma2 = 0."""
    tol = default_tol() if tol is None else tol
    s = support_projector(p.rho1 + p.rho2)
    perp = np.eye(p.dim) - s
    e0 = povm[2]
    r_id = float(np.linalg.norm(e0 @ perp - perp))
    r_un = float(np.linalg.norm(p.gamma1 @ (np.eye(p.dim) - e0) @ p.gamma2))
    return ProperReport(r_id <= 1e3 * tol and r_un <= 1e3 * tol, r_id, r_un)


@dataclass(frozen=True)
class OptimalityReport:
    """Residuals of the optimality conditions.

    `positivity` holds violations of the sandwiched condition
    (L1 - L2) E0 (g2 - g1) E0 (L1 + L2) >= 0 and of its two diagonal blocks;
    `vanishing` holds the norm of the off-diagonal block L1 E0 (g2 - g1) E0 L2.
    `literal` keeps the residuals of the unsandwiched forms, which do not vanish
    on known optima and are reported for diagnosis only.
    """
    optimal: bool
    positivity: tuple[float, float, float]
    vanishing: float
    literal: tuple[float, float]
    rank_e0: int
    rank_expected: int

    @property
    def rank_ok(self) -> bool:
        return self.rank_e0 == self.rank_expected


def _psd_residual(x: np.ndarray) -> float:
    """Violation of x >= 0: anti-Hermitian part norm plus negative eigenvalue magnitude."""
    nh = float(np.linalg.norm(x - dag(x)) / 2)
    return nh + max(0.0, -min_eig(x))


def check_optimality(e0: np.ndarray, p: UsdProblem, tol: float = 1e-7) -> OptimalityReport:
    """Evaluate the optimality conditions for the inconclusive effect of a proper measurement."""
    g1, g2 = p.gamma1, p.gamma2
    eye = np.eye(p.dim)
    s = support_projector(g1 + g2)
    lam1 = intersection_projector(kernel_projector(g2), s)
    lam2 = intersection_projector(kernel_projector(g1), s)
    d = g2 - g1
    pos = (
        _psd_residual((lam1 - lam2) @ e0 @ d @ e0 @ (lam1 + lam2)),
        _psd_residual(lam1 @ e0 @ d @ e0 @ lam1),
        _psd_residual(lam2 @ e0 @ (-d) @ e0 @ lam2),
    )
    van = float(np.linalg.norm(lam1 @ e0 @ d @ e0 @ lam2))
    literal = (_psd_residual((lam1 - lam2) @ e0 @ d @ (lam1 + lam2)),
               float(np.linalg.norm((lam1 - lam2) @ e0 @ d @ (eye - e0))))
    r_e0 = rank(e0, 1e-7)
    r_exp = rank(g1 @ g2, 1e-7) + int(round(np.trace(kernel_projector(g1 + g2)).real))
    ok = max(pos) <= tol and van <= tol
    return OptimalityReport(ok, pos, van, literal, r_e0, r_exp)


def fidelity(g1: np.ndarray, g2: np.ndarray) -> float:
    """Tr sqrt(sqrt(g1) g2 sqrt(g1)) for positive operators."""
    r = psd_sqrt(g1)
    return float(np.trace(psd_sqrt(r @ g2 @ r)).real)


def fidelity_bound(p: UsdProblem) -> float:
    """Upper bound 1 - 2 Tr sqrt(sqrt(g1) g2 sqrt(g1)) on the success probability."""
    return 1.0 - 2.0 * fidelity(p.gamma1, p.gamma2)


@dataclass(frozen=True)
class FidelityForm:
    e0: np.ndarray | None
    feasible: bool
    reason: str = ""
    min_eigs: tuple[float, float] = field(default=(np.nan, np.nan))


def fidelity_form_e0(p: UsdProblem, tol: float = 1e-7) -> FidelityForm:
    """Candidate E0 that attains the fidelity bound, when gamma_i >= F_i holds."""
    if np.trace(common_subspace_projector(p)).real > 0.5:
        return FidelityForm(None, False, "supports share a common subspace")
    g1, g2 = p.gamma1, p.gamma2
    r1, r2 = psd_sqrt(g1), psd_sqrt(g2)
    f1 = psd_sqrt(r1 @ g2 @ r1)
    f2 = psd_sqrt(r2 @ g1 @ r2)
    m1, m2 = min_eig(g1 - f1), min_eig(g2 - f2)
    if m1 < -tol or m2 < -tol:
        return FidelityForm(None, False, "operator inequality gamma_i >= F_i fails", (m1, m2))
    ginv = pinv_on_support(g1 + g2)
    inner = r1 @ (g1 - f1) @ r1 + r2 @ (g2 - f2) @ r2
    e0 = np.eye(p.dim) - ginv @ inner @ ginv
    return FidelityForm(hermitize(e0), True, "", (m1, m2))


@dataclass(frozen=True)
class SubspaceResult:
    povm: Povm
    p_discrimination: float
    regimes: tuple[str, ...]
    cosines: np.ndarray
    n_common: int
    in_interval: bool
    p_interval: float | None


def subspace_interval(n1: int, n2: int, c: float) -> tuple[float, float]:
    """Range of eta1 where every intermediate pair (largest cosine c) uses the POVM form."""
    return (n1 * c**2 / (n1 * c**2 + n2), n1 / (n1 + n2 * c**2))


def subspace_discrimination(p1: np.ndarray, p2: np.ndarray, eta1: float) -> SubspaceResult:
    """Discriminate the uniform states P_i / rank P_i via their Jordan basis."""
    p1 = hermitize(np.asarray(p1, dtype=complex))
    p2 = hermitize(np.asarray(p2, dtype=complex))
    dim = p1.shape[0]
    eta2 = 1.0 - eta1
    v1, v2 = projector_basis(p1), projector_basis(p2)
    n1, n2 = v1.shape[1], v2.shape[1]
    if np.linalg.norm(p1 - p2) < 1e-9:
        povm = Povm((np.zeros((dim, dim)), np.zeros((dim, dim)), np.eye(dim)))
        return SubspaceResult(povm, 0.0, (), np.ones(n1), n1, False, None)
    jp = jordan_basis(v1, v2)
    w = eta1 / n1 + eta2 / n2
    eta1p = (eta1 / n1) / w
    e1 = np.zeros((dim, dim), dtype=complex)
    e2 = np.zeros((dim, dim), dtype=complex)
    regimes = []
    n_common = 0
    fail_sum = 0.0
    inter = []
    m = len(jp.cosines)
    for i, c in enumerate(jp.cosines):
        a, b = jp.basis_a[:, i], jp.basis_b[:, i]
        if c > COMMON_COS:
            n_common += 1
            regimes.append("common")
        elif c < ORTHO_COS:
            e1 += proj(a)
            e2 += proj(b)
            regimes.append("orthogonal")
        else:
            sol = idp_optimal(a, b, eta1p)
            e1 += sol.povm[0]
            e2 += sol.povm[1]
            regimes.append(sol.regime)
            fail_sum += 1.0 - sol.p_discrimination
            inter.append(c)
    for i in range(m, n1):
        e1 += proj(jp.basis_a[:, i])
    for i in range(m, n2):
        e2 += proj(jp.basis_b[:, i])
    povm = _povm3(e1, e2)
    p_d = 1.0 - w * (n_common + fail_sum)
    in_int = False
    p_int = None
    if inter:
        lo, hi = subspace_interval(n1, n2, max(inter))
        in_int = lo <= eta1 <= hi
        if in_int:
            p_int = 1.0 - w * n_common - 2.0 * np.sqrt(eta1 * eta2 / (n1 * n2)) * sum(inter)
    return SubspaceResult(povm, float(p_d), tuple(regimes), jp.cosines, n_common, in_int, p_int)


def solve_pure_or_reduce(p: UsdProblem) -> tuple[Povm, float]:
    """Solve a pair by reductions when each piece ends as two pure states or is trivial.

    Runs the common-subspace and orthogonal-part reductions, then the commutator
    block detector; every block must hold at most one pure state per input.
    """
    red1 = reduce_common_subspace(p)
    if red1.reduced is None:
        eye = np.eye(p.dim)
        return Povm((0 * eye, 0 * eye, eye)), 0.0
    red2 = reduce_orthogonal_subspaces(red1.reduced)
    inner = red2.reduced
    dim = p.dim
    if inner is None:
        zero = np.zeros((dim, dim))
        povm = red1.lift(red2.lift(_povm3(zero, zero)))
        return povm, 1.0 - red1.failure(red2.failure(0.0))
    blocks = two_dim_blocks(inner)
    if blocks is None:
        raise ValueError("no two-dimensional block structure found")
    e1 = np.zeros((dim, dim), dtype=complex)
    e2 = np.zeros((dim, dim), dtype=complex)
    q = 0.0
    for blk in reduce_block_diagonal(inner, blocks, tol=1e-7):
        sub = blk.problem
        if sub is None:
            continue
        v1 = _pure_vector(sub.rho1)
        v2 = _pure_vector(sub.rho2)
        if v1 is None or v2 is None or not 0.0 < sub.eta1 < 1.0:
            # a lone state here would have been split off as an orthogonal part
            q += blk.weight
            continue
        sol = idp_optimal(v1, v2, sub.eta1)
        e1 += blk.projector @ sol.povm[0] @ blk.projector
        e2 += blk.projector @ sol.povm[1] @ blk.projector
        q += blk.weight * sol.p_failure
    povm = red1.lift(red2.lift(_povm3(e1, e2)))
    return povm, 1.0 - red1.failure(red2.failure(q))


def _pure_vector(rho: np.ndarray) -> np.ndarray | None:
    if np.trace(rho).real < 0.5:
        return None
    w, v = np.linalg.eigh(hermitize(rho))
    if w[-1] < 1 - 1e-7:
        raise ValueError("block state is not pure")
    return v[:, -1]
