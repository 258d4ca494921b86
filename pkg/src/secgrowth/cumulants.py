"""Truncated (connected) correlation functions on a matrix-algebra testbed.

States are density matrices; moments are traces of ordered operator
products.  Truncated functions follow the recursion with a distinguished
element,

    omega(J) = sum_{J0 subset J, first(J) in J0} omega^T(J0) omega(J \\ J0),

over order-preserving subsets, equivalently the partition-sum definition
with blocks carrying the induced order (no symmetrization).  The key
identity checked here: applied to a nested commutator, the state and its
truncated extension agree, omega(B) = omega^T(B), term by term in the
signed-subset expansion of B.

Also provides the Monte Carlo estimate of the chain integral
int prod (|t_i - t_{i+1}| + d)^{-(1+eps)} over n-1 time separations and
its closed form (2/(eps d^eps))^{n-1}, the quantitative decay budget
behind the no-growth bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._accel import USE_NUMBA, njit
from .errors import BudgetExceeded, DimensionMismatch

_MAX_TUPLE = 8


@dataclass(frozen=True)
class MatrixState:
    """Density matrix: positive, Hermitian, unit trace."""

    density: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.density, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] < 2:
            raise DimensionMismatch("density must be a d x d matrix with d >= 2")
        if abs(np.trace(rho) - 1.0) > 1e-12:
            raise ValueError("density must have unit trace")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
            raise ValueError("density must be Hermitian")
        eig = np.linalg.eigvalsh(rho)
        if eig.min() < -1e-12:
            raise ValueError("density must be positive semidefinite")
        object.__setattr__(self, "density", rho)

    @property
    def dimension(self) -> int:
        return self.density.shape[0]


@dataclass(frozen=True)
class OrderedIndexSet:
    """Index tuple with the traversal orientations of the commutator expansion.

    `left` is traversed in decreasing order, `right` in increasing order,
    with the observable slot 0 in between.
    """

    left: tuple[int, ...]
    right: tuple[int, ...]

    def ordered(self) -> tuple[int, ...]:
        return tuple(sorted(self.left, reverse=True)) + (0,) + tuple(sorted(self.right))


def _check_ops(state: MatrixState, ops) -> list[np.ndarray]:
    d = state.dimension
    mats = []
    for a in ops:
        a = np.asarray(a, dtype=complex)
        if a.shape != (d, d):
            raise DimensionMismatch(f"operator shape {a.shape} vs state dim {d}")
        mats.append(a)
    return mats


def moments(state: MatrixState, ops, subset) -> complex:
    """tr(rho * prod_{j in subset} ops[j]) in the order given."""
    mats = _check_ops(state, ops)
    idx = tuple(subset)
    if len(idx) < 1:
        raise ValueError("subset must contain at least one index")
    prod = np.eye(state.dimension, dtype=complex)
    for j in idx:
        prod = prod @ mats[j]
    return complex(np.trace(state.density @ prod))


def truncated(state: MatrixState, ops, subset) -> complex:
    """Truncated function omega^T over the ordered index tuple."""
    idx = tuple(subset)
    if len(idx) > _MAX_TUPLE:
        raise BudgetExceeded(f"|J| = {len(idx)} exceeds the combinatorial budget")
    memo: dict[tuple[int, ...], complex] = {}

    def om(J):
        return moments(state, ops, J)

    def omT(J: tuple[int, ...]) -> complex:
        if J in memo:
            return memo[J]
        if len(J) == 1:
            val = om(J)
        else:
            first, rest = J[0], J[1:]
            val = om(J)
            # proper order-preserving subsets containing the first element
            for k in range(0, len(rest)):
                for keep in itertools.combinations(range(len(rest)), k):
                    J0 = (first,) + tuple(rest[i] for i in keep)
                    Jc = tuple(rest[i] for i in range(len(rest)) if i not in keep)
                    if not Jc:
                        continue
                    val -= omT(J0) * om(Jc)
        memo[J] = val
        return val

    return omT(idx)


def reconstruct_moment(state: MatrixState, ops, subset) -> complex:
    """Partition sum sum_P prod_blocks omega^T(block), blocks in induced order."""
    idx = tuple(subset)
    total = 0.0 + 0.0j
    for part in _set_partitions(idx):
        prod = 1.0 + 0.0j
        for block in part:
            prod *= truncated(state, ops, block)
        total += prod
    return total


def _set_partitions(items):
    items = list(items)
    if len(items) == 1:
        yield [tuple(items)]
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [(first,) + part[i]] + part[i + 1 :]
        yield [(first,)] + part


# ----------------------------------------------------------------------
# nested commutators
# ----------------------------------------------------------------------


def nested_commutator(ops) -> np.ndarray:
    """B = [A_n, [ ... [A_1, A_0] ... ]] for ops = [A_0, A_1, ..., A_n]."""
    mats = [np.asarray(a, dtype=complex) for a in ops]
    if len(mats) < 2:
        raise ValueError("need at least A_0 and A_1")
    d = mats[0].shape[0]
    for a in mats:
        if a.shape != (d, d):
            raise DimensionMismatch("all operators must share one dimension")
    B = mats[0]
    for a in mats[1:]:
        B = a @ B - B @ a
    return B


def signed_subset_expansion(ops) -> np.ndarray:
    """Same commutator via sum_I (-1)^{|I^c|} (prod_{<-I} A) A_0 (prod_{->I^c} A)."""
    mats = [np.asarray(a, dtype=complex) for a in ops]
    n = len(mats) - 1
    d = mats[0].shape[0]
    out = np.zeros((d, d), dtype=complex)
    for I in _subsets(range(1, n + 1)):
        Ic = [j for j in range(1, n + 1) if j not in I]
        left = np.eye(d, dtype=complex)
        for i in sorted(I, reverse=True):
            left = left @ mats[i]
        right = np.eye(d, dtype=complex)
        for j in sorted(Ic):
            right = right @ mats[j]
        out += (-1.0) ** len(Ic) * left @ mats[0] @ right
    return out


def _subsets(items):
    items = list(items)
    for k in range(len(items) + 1):
        yield from (set(c) for c in itertools.combinations(items, k))


def commutator_truncation_residual(state: MatrixState, ops, n: int) -> float:
    """|omega(B) - omega^T(B)| with B the nested commutator of A_0..A_n.

    omega^T(B) expands B by the signed-subset formula and replaces each
    moment by the truncated function of the same ordered tuple.
    """
    if n > 5:
        raise BudgetExceeded("n must be <= 5")
    mats = _check_ops(state, ops)
    if len(mats) != n + 1:
        raise DimensionMismatch(f"need n+1 = {n + 1} operators, got {len(mats)}")
    B = nested_commutator(mats)
    om_B = complex(np.trace(state.density @ B))
    omT_B = 0.0 + 0.0j
    for I in _subsets(range(1, n + 1)):
        Ic = [j for j in range(1, n + 1) if j not in I]
        J = OrderedIndexSet(tuple(I), tuple(Ic)).ordered()
        omT_B += (-1.0) ** len(Ic) * truncated(state, mats, J)
    return abs(om_B - omT_B)


# ----------------------------------------------------------------------
# the chain-decay integral (Monte Carlo vs closed form)
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class DecayBoundResult:
    estimate: float
    closed_form: float
    stderr: float


def _mc_weights_numpy(u_abs: np.ndarray, d: float, eps: float, eps0: float) -> np.ndarray:
    # f/q per factor: (2/(eps0 d^eps0)) (|u|+d)^{eps0-eps}; product over the chain
    factor = (2.0 / (eps0 * d**eps0)) * (u_abs + d) ** (eps0 - eps)
    return np.prod(factor, axis=1)


@njit(cache=True)
def _mc_weights_njit(u_abs, d, eps, eps0):  # pragma: no cover - numba path
    n_s, n_f = u_abs.shape
    out = np.empty(n_s)
    c = 2.0 / (eps0 * d**eps0)
    for i in range(n_s):
        w = 1.0
        for j in range(n_f):
            w *= c * (u_abs[i, j] + d) ** (eps0 - eps)
        out[i] = w
    return out


def decay_product_bound(
    n: int,
    d: float,
    eps: float,
    mc_samples: int = 400_000,
    seed: int = 7,
) -> DecayBoundResult:
    """int_{R^{n-1}} prod 1/(|t_i - t_{i+1}| + d)^{1+eps} vs (2/(eps d^eps))^{n-1}.

    Importance sampling from the same family with a heavier tail
    (eps0 = eps/2), so the weights vary and the estimate is a genuine
    Monte Carlo check rather than a constant.
    """
    if not 2 <= n <= 5:
        raise ValueError("n must be in 2..5")
    if d <= 0 or eps <= 0:
        raise ValueError("d and eps must be positive")
    closed = (2.0 / (eps * d**eps)) ** (n - 1)
    eps0 = eps / 2.0
    rng = np.random.default_rng(seed)
    xi = rng.random((mc_samples, n - 1))
    u_abs = d * ((1.0 - xi) ** (-1.0 / eps0) - 1.0)
    if USE_NUMBA:
        w = _mc_weights_njit(u_abs, d, eps, eps0)
    else:
        w = _mc_weights_numpy(u_abs, d, eps, eps0)
    est = float(np.mean(w))
    nb = 20
    batch = w[: (mc_samples // nb) * nb].reshape(nb, -1).mean(axis=1)
    stderr = float(np.std(batch, ddof=1) / math.sqrt(nb))
    return DecayBoundResult(est, closed, stderr)


# ----------------------------------------------------------------------
# seeded testbed instances
# ----------------------------------------------------------------------


def random_state(dim: int, seed: int) -> MatrixState:
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return MatrixState(rho / np.trace(rho))


def random_ops(dim: int, count: int, seed: int) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    return [
        rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        for _ in range(count)
    ]
