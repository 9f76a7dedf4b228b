"""One-parameter perturbations of the ideal CHSH strategy, each with a matching pair of isometries.

Each family maps a parameter to ``(model, IA, IB)``. Isometries for rotated
observables come from the Stinespring dilation of the group-averaged Cl2 lift.
"""
from __future__ import annotations

import numpy as np

from .algebras import SIGMA_X, SIGMA_Z, Representation
from .builtins import binary_pvm, chsh_observables
from .errors import InvalidInputError
from .gowers_hatami import cl2_theta_averaged, stinespring
from .linalg import maximally_entangled
from .strategies import QuantumModel


def _cl2_isometry(obs0: np.ndarray, obs1: np.ndarray, ideal0: np.ndarray, ideal1: np.ndarray) -> np.ndarray:
    rep = Representation.unitary({"b0": obs0, "b1": obs1})
    ideal = Representation.unitary({"b0": ideal0, "b1": ideal1})
    V, _ = stinespring(cl2_theta_averaged().unit_images(rep, ideal))
    return V


class BobRotation:
    """Bob's second observable cos(t) Z + sin(t) X; Alice and the state stay ideal."""

    name = "bob-rotation"

    def __call__(self, t: float):
        A, B = chsh_observables()
        B1 = np.cos(t) * SIGMA_Z + np.sin(t) * SIGMA_X
        S = QuantumModel(np.stack([binary_pvm(o) for o in A]),
                         np.stack([binary_pvm(B[0]), binary_pvm(B1)]), maximally_entangled(2))
        return S, np.eye(2, dtype=np.complex128), _cl2_isometry(B[0], B1, B[0], B[1])


class AliceRotation:
    """Alice's second observable cos(t) A1 + sin(t) A0; Bob and the state stay ideal."""

    name = "alice-rotation"

    def __call__(self, t: float):
        A, B = chsh_observables()
        A1 = np.cos(t) * A[1] + np.sin(t) * A[0]
        S = QuantumModel(np.stack([binary_pvm(A[0]), binary_pvm(A1)]),
                         np.stack([binary_pvm(o) for o in B]), maximally_entangled(2))
        return S, _cl2_isometry(A[0], A1, A[0], A[1]), np.eye(2, dtype=np.complex128)


class Depolarization:
    """Purification of (1 - p)|phi><phi| + p I/4 with one ancilla qubit per party; ideal measurements."""

    name = "depolarization"

    def __call__(self, p: float):
        if not 0 <= p <= 1:
            raise InvalidInputError(f"depolarization strength must lie in [0, 1], got {p}")
        s = 1 / np.sqrt(2)
        bell = np.array([[s, 0, 0, s], [s, 0, 0, -s], [0, s, s, 0], [0, s, -s, 0]], dtype=np.complex128)
        lam = np.array([1 - 3 * p / 4, p / 4, p / 4, p / 4])
        # amplitudes T[a, b, k] with ancilla k = 2 kA + kB
        T = np.einsum("k,kab->abk", np.sqrt(lam), bell.reshape(4, 2, 2)).reshape(2, 2, 2, 2)
        psi = T.transpose(0, 2, 1, 3).reshape(-1)
        A, B = chsh_observables()
        I2 = np.eye(2)
        alice = np.stack([np.stack([np.kron(P, I2) for P in binary_pvm(o)]) for o in A])
        bob = np.stack([np.stack([np.kron(P, I2) for P in binary_pvm(o)]) for o in B])
        S = QuantumModel(alice, bob, psi)
        return S, np.eye(4, dtype=np.complex128), np.eye(4, dtype=np.complex128)


FAMILIES = {
    "bob-rotation": BobRotation,
    "alice-rotation": AliceRotation,
    "depolarization": Depolarization,
}


def builtin_family(name: str):
    try:
        return FAMILIES[name]()
    except KeyError:
        raise InvalidInputError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None
