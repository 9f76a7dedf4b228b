"""Nonlocal games, game polynomials, winning probabilities and see-saw optimisation.

Generators are named by index: Alice's projections ``m{x}_{a}``, Bob's
``n{y}_{b}``, and for binary answers the observables ``a{x}`` and ``b{y}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from .config import DEFAULT, Config
from .errors import DegeneracyError, InvalidInputError
from .linalg import dagger, hermitian_eig
from .polynomials import StarPolynomial, TensorPolynomial


def alice_proj(x: int, a: int) -> str:
    return f"m{x}_{a}"


def bob_proj(y: int, b: int) -> str:
    return f"n{y}_{b}"


def alice_obs(x: int) -> str:
    return f"a{x}"


def bob_obs(y: int) -> str:
    return f"b{y}"


class NonlocalGame:
    """Game (X, Y, A, B, mu, V); ``V`` is indexed ``V[a, b, x, y]``."""

    def __init__(self, X: Sequence, Y: Sequence, A: Sequence, B: Sequence, mu, V,
                 name: str = "", cfg: Config = DEFAULT):
        self.X, self.Y, self.A, self.B = list(X), list(Y), list(A), list(B)
        self.mu = np.asarray(mu, dtype=float)
        self.V = np.asarray(V)
        self.name = name
        shape = (len(self.A), len(self.B), len(self.X), len(self.Y))
        if min(shape) == 0:
            raise InvalidInputError("question and answer sets must be nonempty")
        if self.mu.shape != shape[2:]:
            raise InvalidInputError(f"mu: expected shape {shape[2:]}, got {self.mu.shape}")
        if self.V.shape != shape:
            raise InvalidInputError(f"V: expected shape {shape}, got {self.V.shape}")
        if not np.all(np.isfinite(self.mu)) or np.any(self.mu < 0):
            raise InvalidInputError("mu: entries must be finite and nonnegative")
        if abs(self.mu.sum() - 1.0) > cfg.rel_tol:
            raise InvalidInputError(f"mu: entries sum to {self.mu.sum()!r}, not 1")
        if not np.all((self.V == 0) | (self.V == 1)):
            raise InvalidInputError("V: predicate entries must be 0 or 1")
        self.V = self.V.astype(np.int8)

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return self.V.shape

    @property
    def binary(self) -> bool:
        return len(self.A) == 2 and len(self.B) == 2

    def weights(self) -> np.ndarray:
        """mu(x,y) V(a,b|x,y) as an array indexed [a, b, x, y]."""
        return self.mu[None, None, :, :] * self.V

    def to_game(self) -> "NonlocalGame":
        return self

    def __repr__(self):
        return f"NonlocalGame({self.name or '?'}, |X|={len(self.X)}, |Y|={len(self.Y)}, |A|={len(self.A)}, |B|={len(self.B)})"


class XorGame:
    """XOR game given by its cost matrix omega; mu = |omega|, win iff a xor b = [omega < 0]."""

    def __init__(self, omega, name: str = "", cfg: Config = DEFAULT):
        self.omega = np.asarray(omega, dtype=float)
        self.name = name
        if self.omega.ndim != 2 or self.omega.size == 0:
            raise InvalidInputError("omega: expected a nonempty 2-d array")
        if not np.all(np.isfinite(self.omega)):
            raise InvalidInputError("omega: entries must be finite")
        total = np.abs(self.omega).sum()
        if abs(total - 1.0) > cfg.rel_tol:
            raise InvalidInputError(f"omega: absolute entries sum to {total!r}, not 1")
        if np.any(np.abs(self.omega).sum(axis=1) == 0) or np.any(np.abs(self.omega).sum(axis=0) == 0):
            raise InvalidInputError("omega: all-zero row or column (degenerate question distribution)")

    def to_game(self) -> NonlocalGame:
        nI, nJ = self.omega.shape
        t = (self.omega < 0).astype(int)
        V = np.zeros((2, 2, nI, nJ), dtype=int)
        for a, b in product(range(2), repeat=2):
            V[a, b] = ((a ^ b) == t).astype(int)
        return NonlocalGame(range(nI), range(nJ), [0, 1], [0, 1], np.abs(self.omega), V, name=self.name)

    def __repr__(self):
        return f"XorGame({self.name or '?'}, omega shape {self.omega.shape})"


class SyncGame:
    """Synchronous game on questions X and answers A with uniform question distribution."""

    def __init__(self, X: Sequence, A: Sequence, V, name: str = ""):
        self.X, self.A = list(X), list(A)
        self.V = np.asarray(V)
        self.name = name
        shape = (len(self.A), len(self.A), len(self.X), len(self.X))
        if min(shape) == 0:
            raise InvalidInputError("question and answer sets must be nonempty")
        if self.V.shape != shape:
            raise InvalidInputError(f"V: expected shape {shape}, got {self.V.shape}")
        if not np.all((self.V == 0) | (self.V == 1)):
            raise InvalidInputError("V: predicate entries must be 0 or 1")
        self.V = self.V.astype(np.int8)
        for x in range(len(self.X)):
            off = self.V[:, :, x, x] * (1 - np.eye(len(self.A), dtype=np.int8))
            if off.any():
                a, b = np.argwhere(off)[0]
                raise InvalidInputError(
                    f"V: not synchronous, V(a={self.A[a]!r}, b={self.A[b]!r} | x=y={self.X[x]!r}) = 1")

    def to_game(self) -> NonlocalGame:
        n = len(self.X)
        return NonlocalGame(self.X, self.X, self.A, self.A, np.full((n, n), 1.0 / n**2), self.V, name=self.name)

    def __repr__(self):
        return f"SyncGame({self.name or '?'}, |X|={len(self.X)}, |A|={len(self.A)})"


def as_game(G) -> NonlocalGame:
    return G.to_game()


@dataclass
class Correlation:
    """Conditional probabilities ``p[a, b, x, y]``."""

    p: np.ndarray
    tol: float = 1e-10

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float)
        if self.p.ndim != 4:
            raise InvalidInputError(f"correlation: expected a 4-d array, got shape {self.p.shape}")
        if np.any(self.p < -self.tol):
            raise InvalidInputError(f"correlation: negative entry {self.p.min():.3e}")
        sums = self.p.sum(axis=(0, 1))
        bad = np.abs(sums - 1.0)
        if bad.size and bad.max() > self.tol:
            x, y = np.unravel_index(np.argmax(bad), bad.shape)
            raise InvalidInputError(f"correlation: p(.,.|{x},{y}) sums to {sums[x, y]!r}")

    def __getitem__(self, idx):
        return self.p[idx]

    def max_diff(self, other: "Correlation") -> float:
        return float(np.max(np.abs(self.p - other.p)))


def game_polynomial(G) -> TensorPolynomial:
    """Sum of mu(x,y) V(a,b|x,y) m^x_a (x) n^y_b over winning tuples."""
    g = as_game(G)
    terms = []
    for a, b, x, y in zip(*np.nonzero(g.V)):
        terms.append(((((alice_proj(x, a), False),), ((bob_proj(y, b), False),)), g.mu[x, y]))
    return TensorPolynomial(terms)


def observable_form(poly: TensorPolynomial, nX: int, nY: int) -> TensorPolynomial:
    """Rewrite binary projections through m^x_a = (1 + (-1)^a a_x)/2, then reduce a_x^2 = b_y^2 = 1."""
    one = StarPolynomial.const(1.0)
    left = {alice_proj(x, a): (one + (-1) ** a * StarPolynomial.gen(alice_obs(x))) * 0.5
            for x in range(nX) for a in range(2)}
    right = {bob_proj(y, b): (one + (-1) ** b * StarPolynomial.gen(bob_obs(y))) * 0.5
             for y in range(nY) for b in range(2)}
    names = [alice_obs(x) for x in range(nX)] + [bob_obs(y) for y in range(nY)]
    return poly.substitute(left, right).normalise(selfadjoint=names, involutions=names)


def winning_probability(G, p: Correlation | np.ndarray) -> float:
    g = as_game(G)
    arr = p.p if isinstance(p, Correlation) else np.asarray(p, dtype=float)
    if arr.shape != g.shape:
        raise InvalidInputError(f"correlation shape {arr.shape} does not match game shape {g.shape}")
    return float(np.sum(g.weights() * arr))


def game_operator(G, alice: np.ndarray, bob: np.ndarray) -> np.ndarray:
    """Matrix of the game polynomial under a pair of measurement arrays (direct route, no polynomials)."""
    W = as_game(G).weights()
    dA, dB = alice.shape[-1], bob.shape[-1]
    out = np.zeros((dA * dB, dA * dB), dtype=np.complex128)
    for a, b, x, y in zip(*np.nonzero(W)):
        out += W[a, b, x, y] * np.kron(alice[x, a], bob[y, b])
    return out


def xor_biases(G: XorGame, S, cfg: Config = DEFAULT) -> tuple[np.ndarray, np.ndarray]:
    """Row biases r_i = |sum_j w_ij (I (x) Y_j) psi| and column biases c_j = |sum_i w_ij (X_i (x) I) psi|."""
    omega = G.omega
    if S.alice.shape[:2] != (omega.shape[0], 2) or S.bob.shape[:2] != (omega.shape[1], 2):
        raise InvalidInputError("strategy shape does not match the XOR game")
    Xo = S.alice[:, 0] - S.alice[:, 1]
    Yo = S.bob[:, 0] - S.bob[:, 1]
    Psi = S.psi.reshape(S.dA, S.dB)
    # (I (x) Y) psi  <->  Psi Y^T ; (X (x) I) psi <-> X Psi
    YPsi = np.einsum("kl,jml->jkm", Psi, Yo)
    XPsi = np.einsum("ikl,lm->ikm", Xo, Psi)
    r = np.array([np.linalg.norm(np.tensordot(omega[i], YPsi, axes=1)) for i in range(omega.shape[0])])
    c = np.array([np.linalg.norm(np.tensordot(omega[:, j], XPsi, axes=1)) for j in range(omega.shape[1])])
    if np.any(r <= cfg.norm_tol) or np.any(c <= cfg.norm_tol):
        raise DegeneracyError(f"vanishing XOR bias (rows {r}, columns {c})")
    return r, c


def product_game(G1: SyncGame, G2: SyncGame) -> SyncGame:
    """Questions X1 x X2, answers A1 x A2, predicate V1 V2 (pairs flattened in row-major order)."""
    V = np.einsum("abxy,cdzw->acbdxzyw", G1.V, G2.V)
    nA, nX = len(G1.A) * len(G2.A), len(G1.X) * len(G2.X)
    name = f"{G1.name}x{G2.name}" if G1.name and G2.name else ""
    return SyncGame(list(product(G1.X, G2.X)), list(product(G1.A, G2.A)), V.reshape(nA, nA, nX, nX), name=name)


# see-saw -------------------------------------------------------------------------

@dataclass
class SeeSawResult:
    model: object
    value: float
    restart: int
    history: list[float] = field(default_factory=list)
    values: list[float] = field(default_factory=list)


def _best_response(effects: np.ndarray, O: np.ndarray, cfg: Config, rounds: int) -> np.ndarray:
    """Maximise sum_a Tr(P_a O_a) over PVMs by exact re-splitting of pairs P_a + P_a'."""
    k = effects.shape[0]
    P = effects.copy()
    if k == 1:
        return P
    for _ in range(rounds if k > 2 else 1):
        for a in range(k - 1):
            for b in range(a + 1, k):
                S = P[a] + P[b]
                D = S @ (O[a] - O[b]) @ S
                w, U = hermitian_eig(0.5 * (D + dagger(D)), cfg)
                cols = U[:, w > cfg.rank_tol * max(1.0, np.abs(w).max())]
                Pa = cols @ dagger(cols)
                P[a], P[b] = Pa, S - Pa
    return P


def see_saw_optimize(G, dA: int, dB: int, seed: int = 0, iters: int = 500, restarts: int = 20,
                     tol: float = 1e-14, cfg: Config = DEFAULT) -> SeeSawResult:
    """Alternate exact best responses for Alice, Bob and the state; keep the best of ``restarts`` runs.

    ``history`` holds the objective after every half-step of the winning restart; it is non-decreasing.
    """
    from .linalg import random_projective_measurement, random_state
    from .strategies import QuantumModel

    if dA < 1 or dB < 1:
        raise InvalidInputError("dimensions must be at least 1")
    g = as_game(G)
    nA, nB, nX, nY = g.shape
    W = g.weights()
    rng = np.random.default_rng(seed)
    best = None
    values = []
    for run in range(restarts):
        alice = np.stack([random_projective_measurement(dA, nA, rng) for _ in range(nX)])
        bob = np.stack([random_projective_measurement(dB, nB, rng) for _ in range(nY)])
        psi = random_state(dA * dB, rng)
        hist: list[float] = []
        prev = -np.inf
        for _ in range(iters):
            Psi = psi.reshape(dA, dB)
            # Alice: Tr(M Psi N^T Psi^H)
            BT = np.einsum("ij,ybkj,lk->ybil", Psi, bob, np.conj(Psi))
            OA = np.einsum("abxy,ybil->xail", W, BT)
            for x in range(nX):
                alice[x] = _best_response(alice[x], OA[x], cfg, rounds=3)
            hist.append(_objective(W, alice, bob, Psi))
            # Bob: Tr(N (Psi^H M Psi)^T)
            AT = np.einsum("ki,xakl,lj->xaji", np.conj(Psi), alice, Psi)
            OB = np.einsum("abxy,xaji->ybji", W, AT)
            for y in range(nY):
                bob[y] = _best_response(bob[y], OB[y], cfg, rounds=3)
            hist.append(_objective(W, alice, bob, Psi))
            w, U = hermitian_eig(game_operator(g, alice, bob), cfg)
            psi = U[:, -1]
            hist.append(float(w[-1]))
            if hist[-1] - prev <= tol:
                break
            prev = hist[-1]
        model = QuantumModel(alice.copy(), bob.copy(), psi.copy(), validate=False)
        val = winning_probability(g, model.correlation(check=False))
        values.append(val)
        if best is None or val > best.value:
            best = SeeSawResult(model, val, run, hist)
    best.values = values
    return best


def _objective(W, alice, bob, Psi) -> float:
    p = np.einsum("ij,xaik,kl,ybjl->abxy", np.conj(Psi), alice, Psi, bob)
    return float(np.real(np.sum(W * p)))
