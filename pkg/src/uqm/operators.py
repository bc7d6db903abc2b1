"""Dense operator helpers: permutation projectors, supports, partial traces, POVMs, Haar sampling."""
from __future__ import annotations

import itertools
import math
import os
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


def default_tol() -> float:
    """Numeric threshold shared by the package; override with the UQM_TOL env var."""
    return float(os.environ.get("UQM_TOL", "1e-9"))


class EmptySubspaceWarning(UserWarning):
    """Raised (as a warning) when an antisymmetric subspace has dimension zero."""


def make_rng(seed: int | np.random.Generator | None = 0) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def dag(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def ket(*amps) -> np.ndarray:
    v = np.asarray(amps, dtype=complex).ravel()
    return v


def basis(d: int, i: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[i] = 1.0
    return v


def proj(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    return np.outer(v, v.conj())


def kron(*ops) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex) if np.ndim(ops[0]) == 2 else np.ones(1, dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


def hermitize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + dag(a))


def is_hermitian(a: np.ndarray, tol: float | None = None) -> bool:
    tol = default_tol() if tol is None else tol
    return bool(np.linalg.norm(a - dag(a)) <= tol * max(1.0, np.linalg.norm(a)))


def min_eig(a: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(hermitize(a))[0])


def permutation_operator(perm: Sequence[int], d: int) -> np.ndarray:
    """Operator sending |i_0 ... i_{n-1}> to the state whose slot perm[j] holds i_j."""
    n = len(perm)
    dim = d**n
    eye = np.eye(dim, dtype=complex).reshape([d] * n + [dim])
    # column c is basis vector c with tensor factors moved: factor j goes to slot perm[j]
    inv = np.argsort(perm)
    out = np.transpose(eye, list(inv) + [n])
    return out.reshape(dim, dim)


def _check_subsystems(k: int, subsystem_set: Sequence[int] | None, total_parties: int | None):
    if subsystem_set is None:
        subsystem_set = list(range(k))
    subsystem_set = [int(s) for s in subsystem_set]
    total = total_parties if total_parties is not None else max(subsystem_set) + 1
    if k < 1 or len(subsystem_set) != k:
        raise ValueError("subsystem_set must list exactly k parties")
    if len(set(subsystem_set)) != k or min(subsystem_set) < 0 or max(subsystem_set) >= total:
        raise ValueError(f"invalid subsystem indices {subsystem_set} for {total} parties")
    if k > total:
        raise ValueError("k exceeds total_parties")
    return subsystem_set, total


def _embed(op: np.ndarray, d: int, subsystems: Sequence[int], total: int) -> np.ndarray:
    """Tensor a k-party operator acting on `subsystems` with identity on the rest."""
    k = len(subsystems)
    rest = [i for i in range(total) if i not in subsystems]
    full = np.kron(op, np.eye(d ** len(rest), dtype=complex))
    order = list(subsystems) + rest  # current slot j holds party order[j]
    perm = np.empty(total, dtype=int)
    perm[:] = order
    P = permutation_operator(perm, d)
    return P @ full @ dag(P)


def _sym_sum(d: int, k: int, sign: bool) -> np.ndarray:
    dim = d**k
    acc = np.zeros((dim, dim), dtype=complex)
    for perm in itertools.permutations(range(k)):
        s = 1.0
        if sign:
            s = _perm_sign(perm)
        acc += s * permutation_operator(perm, d)
    return acc / math.factorial(k)


def _perm_sign(perm: Sequence[int]) -> int:
    perm = list(perm)
    sgn = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sgn = -sgn
    return sgn


def _sym_iterated(d: int, k: int, sign: bool) -> np.ndarray:
    # P_k = P_{k-1} (1/k)(I + sum_{j<k} (+/-) S_{j,k}) with P_{k-1} acting on the first k-1 parties
    P = np.eye(d, dtype=complex)
    for m in range(2, k + 1):
        dim = d**m
        Pm1 = np.kron(P, np.eye(d))
        step = np.eye(dim, dtype=complex)
        for j in range(m - 1):
            perm = list(range(m))
            perm[j], perm[m - 1] = perm[m - 1], perm[j]
            step += (-1.0 if sign else 1.0) * permutation_operator(perm, d)
        P = Pm1 @ step / m
        P = hermitize(P)
    return P


def symmetric_dim(d: int, k: int) -> int:
    return math.comb(d + k - 1, k)


def symmetric_projector(d: int, k: int, subsystem_set: Sequence[int] | None = None,
                        total_parties: int | None = None) -> np.ndarray:
    """Projector onto the symmetric subspace of the listed parties, identity elsewhere."""
    subs, total = _check_subsystems(k, subsystem_set, total_parties)
    core = _sym_sum(d, k, False) if k <= 6 else _sym_iterated(d, k, False)
    if total == k and list(subs) == list(range(k)):
        return core
    return _embed(core, d, subs, total)


def antisymmetric_projector(d: int, k: int, subsystem_set: Sequence[int] | None = None,
                            total_parties: int | None = None) -> np.ndarray:
    """Projector onto the totally antisymmetric subspace; zero (with a warning) when k > d."""
    subs, total = _check_subsystems(k, subsystem_set, total_parties)
    if k > d:
        warnings.warn(f"antisymmetric subspace of {k} parties in dimension {d} is empty",
                      EmptySubspaceWarning, stacklevel=2)
        return np.zeros((d**total, d**total), dtype=complex)
    core = _sym_sum(d, k, True) if k <= 6 else _sym_iterated(d, k, True)
    if total == k and list(subs) == list(range(k)):
        return core
    return _embed(core, d, subs, total)


def swap(d: int, i: int = 0, j: int = 1, total_parties: int = 2) -> np.ndarray:
    perm = list(range(total_parties))
    perm[i], perm[j] = perm[j], perm[i]
    return permutation_operator(perm, d)


def support_projector(a: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Projector onto eigenvectors with eigenvalue above tol * max eigenvalue."""
    tol = default_tol() if tol is None else tol
    w, v = np.linalg.eigh(hermitize(a))
    top = max(abs(w).max(initial=0.0), 0.0)
    if top == 0.0:
        return np.zeros_like(a, dtype=complex)
    if w[0] < -tol * max(top, 1.0):
        raise ValueError(f"operator is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    keep = v[:, w > tol * top]
    return keep @ dag(keep)


def kernel_projector(a: np.ndarray, tol: float | None = None) -> np.ndarray:
    return np.eye(a.shape[0]) - support_projector(a, tol)


def projector_basis(p: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(hermitize(p))
    return v[:, w > 0.5]


def intersection_projector(p: np.ndarray, q: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Projector onto range(p) ∩ range(q) for two projectors."""
    w, v = np.linalg.eigh(hermitize(p + q))
    keep = v[:, w > 2.0 - tol]
    return keep @ dag(keep)


def rank(a: np.ndarray, tol: float | None = None) -> int:
    tol = default_tol() if tol is None else tol
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def psd_sqrt(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(hermitize(a))
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ dag(v)


def pinv_on_support(a: np.ndarray, tol: float | None = None) -> np.ndarray:
    tol = default_tol() if tol is None else tol
    w, v = np.linalg.eigh(hermitize(a))
    top = abs(w).max(initial=0.0)
    inv = np.where(w > tol * top, 1.0 / np.where(w == 0, 1, w), 0.0)
    return (v * inv) @ dag(v)


def trace_norm(a: np.ndarray) -> float:
    return float(np.linalg.svd(a, compute_uv=False).sum())


@dataclass(frozen=True)
class PovmReport:
    min_eigenvalues: tuple[float, ...]
    sum_deviation: float
    tol: float
    valid: bool

    def __bool__(self) -> bool:
        return self.valid


@dataclass(frozen=True)
class Povm:
    """Ordered effects on a common dimension."""
    effects: tuple[np.ndarray, ...]
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        effects = tuple(np.asarray(e, dtype=complex) for e in self.effects)
        dims = {e.shape for e in effects}
        if len(dims) != 1 or any(len(s) != 2 or s[0] != s[1] for s in dims):
            raise ValueError("effects must be square matrices of one dimension")
        object.__setattr__(self, "effects", effects)

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]

    def __len__(self) -> int:
        return len(self.effects)

    def __getitem__(self, i: int) -> np.ndarray:
        return self.effects[i]

    def probabilities(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        if rho.ndim == 1:
            rho = proj(rho)
        return np.array([np.trace(e @ rho).real for e in self.effects])


def validate_povm(p: Povm | Sequence[np.ndarray], tol: float | None = None) -> PovmReport:
    """Report per-effect minimum eigenvalue and the trace norm of sum - I."""
    tol = default_tol() if tol is None else tol
    effects = p.effects if isinstance(p, Povm) else tuple(np.asarray(e) for e in p)
    mins = tuple(min_eig(e) for e in effects)
    herm = all(is_hermitian(e, tol) for e in effects)
    dev = trace_norm(sum(effects) - np.eye(effects[0].shape[0]))
    ok = herm and min(mins) >= -tol and dev <= tol * max(1.0, effects[0].shape[0])
    return PovmReport(mins, dev, tol, ok)


def haar_unitary(d: int, rng: np.random.Generator | int | None = None) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix with diagonal phase fix."""
    rng = make_rng(rng)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def haar_state(d: int, rng: np.random.Generator | int | None = None) -> np.ndarray:
    rng = make_rng(rng)
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def partial_trace(a: np.ndarray, traced: Sequence[int] | int, dims: Sequence[int]) -> np.ndarray:
    """Trace out the listed subsystems of an operator on a tensor product with factor sizes dims."""
    dims = [int(x) for x in dims]
    if isinstance(traced, (int, np.integer)):
        traced = [int(traced)]
    traced = sorted(set(int(t) for t in traced))
    n = len(dims)
    total = int(np.prod(dims))
    a = np.asarray(a)
    if a.shape != (total, total):
        raise ValueError(f"operator shape {a.shape} inconsistent with dims {dims}")
    if any(t < 0 or t >= n for t in traced):
        raise ValueError("traced subsystem index out of range")
    t = a.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for i in traced:
        col[i] = row[i]
    keep = [i for i in range(n) if i not in traced]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    res = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    kd = int(np.prod([dims[i] for i in keep])) if keep else 1
    return res.reshape(kd, kd)


def permute_subsystems(a: np.ndarray, order: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors of an operator: new factor j is old factor order[j]."""
    n = len(dims)
    t = np.asarray(a).reshape(list(dims) * 2)
    t = np.transpose(t, list(order) + [n + o for o in order])
    d = int(np.prod(dims))
    return t.reshape(d, d)


def permute_vector(v: np.ndarray, order: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    t = np.asarray(v).reshape(list(dims))
    return np.transpose(t, list(order)).ravel()


def collective_twirl(x: np.ndarray, d: int, k: int) -> np.ndarray:
    """Exact Haar average of U^{(x)k} X U^dag{(x)k}, the projection onto span of permutations.

    Uses the Gram matrix of the k! permutation operators (pseudo-inverse, since they are
    linearly dependent when k > d).
    """
    perms = [permutation_operator(p, d) for p in itertools.permutations(range(k))]
    gram = np.array([[np.trace(dag(a) @ b) for b in perms] for a in perms])
    coef = np.linalg.pinv(gram, hermitian=True) @ np.array([np.trace(dag(p) @ x) for p in perms])
    return sum(c * p for c, p in zip(coef, perms))
