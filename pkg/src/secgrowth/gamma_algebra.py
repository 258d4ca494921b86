"""Dirac gamma matrices and trace identities.

Convention: metric eta = diag(-1,+1,+1,+1) with Clifford relation
{gamma^mu, gamma^nu} = -2 eta^{mu nu} * 1, so the standard Dirac-basis
matrices apply unchanged ((gamma^0)^2 = +1, (gamma^i)^2 = -1) and the
trace table reads tr(g^mu g^nu) = -4 eta^{mu nu}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ETA = np.diag([-1.0, 1.0, 1.0, 1.0])

_sigma = [
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]

_g0 = np.block([[np.eye(2), np.zeros((2, 2))], [np.zeros((2, 2)), -np.eye(2)]]).astype(
    complex
)
_gi = [
    np.block([[np.zeros((2, 2)), s], [-s, np.zeros((2, 2))]]).astype(complex)
    for s in _sigma
]


@dataclass(frozen=True)
class GammaBasis:
    """Concrete 4x4 realization of the gamma matrices plus the metric."""

    gamma: tuple = field(default_factory=lambda: (_g0, _gi[0], _gi[1], _gi[2]))
    metric: np.ndarray = field(default_factory=lambda: ETA.copy())

    def anticommutator(self, mu: int, nu: int) -> np.ndarray:
        g = self.gamma
        return g[mu] @ g[nu] + g[nu] @ g[mu]

    def slash(self, vec) -> np.ndarray:
        """gamma^mu v_mu for a 4-vector given with upper index (v^0, v^i):
        contraction uses the metric, gamma^mu eta_{mu nu} v^nu."""
        v = np.asarray(vec, dtype=complex)
        lowered = self.metric @ v
        return sum(self.gamma[mu] * lowered[mu] for mu in range(4))


DIRAC_BASIS = GammaBasis()
G0, G1, G2, G3 = DIRAC_BASIS.gamma
IDENTITY4 = np.eye(4, dtype=complex)


def gamma_spatial_dot(vec3) -> np.ndarray:
    """gamma^i v_i for a spatial 3-vector."""
    v = np.asarray(vec3, dtype=complex)
    return v[0] * G1 + v[1] * G2 + v[2] * G3


def gamma_trace(indices) -> complex:
    """Trace of the ordered product gamma^{i1} ... gamma^{in} (up to 6 indices)."""
    idx = list(indices)
    if len(idx) > 6:
        raise ValueError("gamma_trace supports at most 6 indices")
    out = IDENTITY4
    for i in idx:
        if i not in (0, 1, 2, 3):
            raise ValueError(f"Lorentz index must be 0..3, got {i}")
        out = out @ DIRAC_BASIS.gamma[i]
    return complex(np.trace(out))
