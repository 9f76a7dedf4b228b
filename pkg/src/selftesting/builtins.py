"""Built-in games, ideal strategies, determining pairs and perturbation families."""
from __future__ import annotations

from itertools import product

import numpy as np

from .algebras import SIGMA_X, SIGMA_Z, DeterminingPair, synchronous_pair, xor_pair
from .errors import InvalidInputError
from .games import NonlocalGame, SyncGame, XorGame, alice_obs, bob_obs, xor_biases
from .linalg import maximally_entangled
from .polynomials import StarPolynomial, TensorPolynomial
from .strategies import QuantumModel, tensor_models

SQRT2 = np.sqrt(2.0)
CHSH_VALUE = (2 + SQRT2) / 4


def binary_pvm(obs: np.ndarray) -> np.ndarray:
    """Projections (1 + O)/2, (1 - O)/2 of a binary observable."""
    I = np.eye(obs.shape[0])
    return np.stack([(I + obs) / 2, (I - obs) / 2])


def chsh_xor() -> XorGame:
    return XorGame(np.array([[1.0, 1.0], [1.0, -1.0]]) / 4, name="chsh")


def chsh() -> NonlocalGame:
    return chsh_xor().to_game()


def chsh_observables() -> tuple[list[np.ndarray], list[np.ndarray]]:
    A = [(SIGMA_X + SIGMA_Z) / SQRT2, (SIGMA_X - SIGMA_Z) / SQRT2]
    B = [SIGMA_X, SIGMA_Z]
    return A, B


def chsh_ideal() -> QuantumModel:
    A, B = chsh_observables()
    return QuantumModel(np.stack([binary_pvm(o) for o in A]), np.stack([binary_pvm(o) for o in B]),
                        maximally_entangled(2))


def chsh_pair() -> DeterminingPair:
    G = chsh_xor()
    r, _ = xor_biases(G, chsh_ideal())
    return xor_pair(G, (r,))


def chsh_displayed_polynomial() -> TensorPolynomial:
    """1/2 + (1/4)(a0 b0 + a0 b1 + a1 b0 - a1 b1), the observable-form display with coefficient 1/4."""
    one = StarPolynomial.const(1.0)
    a = [StarPolynomial.gen(alice_obs(x)) for x in range(2)]
    b = [StarPolynomial.gen(bob_obs(y)) for y in range(2)]
    t = TensorPolynomial.tensor
    return (t(one, one) * 0.5
            + (t(a[0], b[0]) + t(a[0], b[1]) + t(a[1], b[0]) - t(a[1], b[1])) * 0.25)


def k3_coloring() -> SyncGame:
    """3-coloring of the triangle: equal questions need equal colors, distinct questions distinct colors."""
    n = 3
    V = np.zeros((n, n, n, n), dtype=int)
    for a, b, x, y in product(range(n), repeat=4):
        V[a, b, x, y] = int(a == b) if x == y else int(a != b)
    return SyncGame(range(n), range(n), V, name="k3-coloring")


def k3_ideal() -> QuantumModel:
    """M^x_a = |a - x mod 3><a - x mod 3| on both sides with the maximally entangled state."""
    E = np.zeros((3, 3, 3, 3), dtype=np.complex128)
    for x, a in product(range(3), repeat=2):
        k = (a - x) % 3
        E[x, a, k, k] = 1.0
    return QuantumModel(E, E.copy(), maximally_entangled(3))


def nonlocal_product(G1: NonlocalGame, G2: NonlocalGame, name: str = "") -> NonlocalGame:
    """Parallel composition of general games: mu1 mu2 and V1 V2 on paired labels."""
    V = np.einsum("abxy,cdzw->acbdxzyw", G1.V, G2.V)
    nA, nB = len(G1.A) * len(G2.A), len(G1.B) * len(G2.B)
    nX, nY = len(G1.X) * len(G2.X), len(G1.Y) * len(G2.Y)
    mu = np.einsum("xy,zw->xzyw", G1.mu, G2.mu).reshape(nX, nY)
    return NonlocalGame(list(product(G1.X, G2.X)), list(product(G1.Y, G2.Y)),
                        list(product(G1.A, G2.A)), list(product(G1.B, G2.B)),
                        mu, V.reshape(nA, nB, nX, nY), name=name)


def chsh_parallel_2() -> NonlocalGame:
    return nonlocal_product(chsh(), chsh(), name="chsh-parallel-2")


def chsh_parallel_2_ideal() -> QuantumModel:
    return tensor_models(chsh_ideal(), chsh_ideal())


GAMES = {
    "chsh": chsh_xor,
    "k3-coloring": k3_coloring,
    "chsh-parallel-2": chsh_parallel_2,
}

IDEALS = {
    "chsh": chsh_ideal,
    "k3-coloring": k3_ideal,
    "chsh-parallel-2": chsh_parallel_2_ideal,
}

PAIRS = {
    "chsh": chsh_pair,
    "k3-coloring": lambda: synchronous_pair(k3_coloring()),
}


def builtin_game(name: str):
    try:
        return GAMES[name]()
    except KeyError:
        raise InvalidInputError(f"unknown built-in game {name!r}; choose from {sorted(GAMES)}") from None


def builtin_ideal(name: str) -> QuantumModel:
    try:
        return IDEALS[name]()
    except KeyError:
        raise InvalidInputError(f"no built-in ideal strategy for {name!r}") from None


def builtin_pair(name: str) -> DeterminingPair:
    try:
        return PAIRS[name]()
    except KeyError:
        raise InvalidInputError(f"no built-in determining pair for {name!r}; choose from {sorted(PAIRS)}") from None
