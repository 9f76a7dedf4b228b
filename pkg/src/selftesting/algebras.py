"""Representations of *-algebras given by generators, relation residuals, determining pairs."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping

import numpy as np

from .config import DEFAULT, Config
from .errors import DegeneracyError, InvalidInputError, PreconditionError, ValidationError
from .games import SyncGame, XorGame, bob_obs, bob_proj
from .linalg import as_matrix, dagger, eigvalsh, kron, maximally_entangled, random_unitary
from .polynomials import StarPolynomial, TensorPolynomial, Word

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
ID2 = np.eye(2, dtype=np.complex128)


class Representation:
    """Concrete matrices for named generators, all of one square dimension.

    ``pvm_groups`` lists generator names whose images must be projections summing
    to the identity; ``orders`` maps unitary generators to their order (2 for
    binary observables).
    """

    def __init__(self, images: Mapping[str, np.ndarray], kind: str = "generic",
                 pvm_groups: Iterable[Iterable[str]] = (), orders: Mapping[str, int] | None = None):
        if not images:
            raise InvalidInputError("representation needs at least one generator")
        self.images = {str(k): as_matrix(v, f"image of {k}", square=True) for k, v in images.items()}
        dims = {m.shape[0] for m in self.images.values()}
        if len(dims) != 1:
            raise InvalidInputError(f"generator images have different dimensions {sorted(dims)}")
        self.dim = dims.pop()
        self.kind = kind
        self.pvm_groups = [list(g) for g in pvm_groups]
        self.orders = dict(orders or {})
        for name in [n for g in self.pvm_groups for n in g] + list(self.orders):
            if name not in self.images:
                raise InvalidInputError(f"declared generator {name!r} has no image")

    @classmethod
    def from_measurements(cls, arr: np.ndarray, proj_name, obs_name) -> "Representation":
        images, groups, orders = {}, [], {}
        for x in range(arr.shape[0]):
            names = [proj_name(x, a) for a in range(arr.shape[1])]
            for a, n in enumerate(names):
                images[n] = arr[x, a]
            groups.append(names)
            if arr.shape[1] == 2:
                images[obs_name(x)] = arr[x, 0] - arr[x, 1]
                orders[obs_name(x)] = 2
        return cls(images, "pvm", groups, orders)

    @classmethod
    def unitary(cls, images: Mapping[str, np.ndarray], order: int = 2) -> "Representation":
        return cls(images, "unitary", orders={k: order for k in images})

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.images[name]
        except KeyError:
            raise InvalidInputError(f"generator {name!r} has no image") from None

    def __contains__(self, name: str) -> bool:
        return name in self.images

    @property
    def generators(self) -> list[str]:
        return list(self.images)

    def validate(self, cfg: Config = DEFAULT) -> "Representation":
        I = np.eye(self.dim)
        for group in self.pvm_groups:
            for n in group:
                P = self.images[n]
                res = max(np.max(np.abs(P - dagger(P))), np.max(np.abs(P @ P - P)))
                if res > cfg.projective_tol:
                    raise ValidationError(f"{n} projection", res)
            res = float(np.max(np.abs(sum(self.images[n] for n in group) - I)))
            if res > cfg.projective_tol:
                raise ValidationError(f"{'+'.join(group)} = 1", res)
        for n, k in self.orders.items():
            U = self.images[n]
            res = float(np.max(np.abs(U @ dagger(U) - I)))
            if res > cfg.projective_tol:
                raise ValidationError(f"{n} unitary", res)
            res = float(np.max(np.abs(np.linalg.matrix_power(U, k) - I)))
            if res > cfg.projective_tol:
                raise ValidationError(f"{n}^{k} = 1", res)
        return self

    def eval_word(self, word: Word) -> np.ndarray:
        M = np.eye(self.dim, dtype=np.complex128)
        for name, adj in word:
            img = self[name]
            M = M @ (dagger(img) if adj else img)
        return M

    def eval(self, p: StarPolynomial) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for w, c in p.terms.items():
            out += c * self.eval_word(w)
        return out

    def residuals(self, relations: Iterable[StarPolynomial], rho=None) -> list[float]:
        """Operator norm (or rho-norm when ``rho`` is given) of each relation's image."""
        from .linalg import op_norm, rho_norm
        return [rho_norm(self.eval(r), rho) if rho is not None else op_norm(self.eval(r)) for r in relations]

    def conjugate(self, U: np.ndarray) -> "Representation":
        return Representation({k: U @ v @ dagger(U) for k, v in self.images.items()},
                              self.kind, self.pvm_groups, self.orders)

    def restrict(self, names: Iterable[str]) -> "Representation":
        names = list(names)
        keep = set(names)
        return Representation({k: self.images[k] for k in names}, self.kind,
                              [g for g in self.pvm_groups if set(g) <= keep],
                              {k: v for k, v in self.orders.items() if k in keep})

    def direct_sum(self, other: "Representation") -> "Representation":
        if set(self.images) != set(other.images):
            raise InvalidInputError("direct sum needs identical generator sets")
        imgs = {}
        for k, v in self.images.items():
            w = other.images[k]
            B = np.zeros((self.dim + other.dim,) * 2, dtype=np.complex128)
            B[:self.dim, :self.dim], B[self.dim:, self.dim:] = v, w
            imgs[k] = B
        return Representation(imgs, self.kind, self.pvm_groups, self.orders)

    def tensor_product(self, other: "Representation", prefixes=("l", "r")) -> "Representation":
        """External tensor product: ``prefix0+g`` acts as g (x) I, ``prefix1+h`` as I (x) h."""
        p, q = prefixes
        I1, I2 = np.eye(self.dim), np.eye(other.dim)
        imgs = {p + k: np.kron(v, I2) for k, v in self.images.items()}
        imgs.update({q + k: np.kron(I1, v) for k, v in other.images.items()})
        groups = [[p + n for n in g] for g in self.pvm_groups] + [[q + n for n in g] for g in other.pvm_groups]
        orders = {p + k: v for k, v in self.orders.items()}
        orders.update({q + k: v for k, v in other.orders.items()})
        return Representation(imgs, self.kind if self.kind == other.kind else "generic", groups, orders)

    def __repr__(self):
        return f"Representation(dim={self.dim}, kind={self.kind}, generators={self.generators})"


class ProductRepresentation:
    """Bipartite representation pi_A (x) pi_B on C^dA (x) C^dB."""

    def __init__(self, left: Representation, right: Representation):
        self.left, self.right = left, right

    @property
    def dim(self) -> int:
        return self.left.dim * self.right.dim

    def eval_tensor(self, p: TensorPolynomial) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for (wl, wr), c in p.terms.items():
            out += c * np.kron(self.left.eval_word(wl), self.right.eval_word(wr))
        return out

    def conjugate(self, UA: np.ndarray, UB: np.ndarray) -> "ProductRepresentation":
        return ProductRepresentation(self.left.conjugate(UA), self.right.conjugate(UB))

    def validate(self, cfg: Config = DEFAULT) -> "ProductRepresentation":
        self.left.validate(cfg)
        self.right.validate(cfg)
        return self


class BlockRepresentation:
    """Direct sum of bipartite representations (block-diagonal images)."""

    def __init__(self, blocks: Iterable[ProductRepresentation]):
        self.blocks = list(blocks)

    @property
    def dim(self) -> int:
        return sum(b.dim for b in self.blocks)

    def eval_tensor(self, p: TensorPolynomial) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        k = 0
        for b in self.blocks:
            out[k:k + b.dim, k:k + b.dim] = b.eval_tensor(p)
            k += b.dim
        return out

    def validate(self, cfg: Config = DEFAULT) -> "BlockRepresentation":
        for b in self.blocks:
            b.validate(cfg)
        return self


def eval_poly(rep, p) -> np.ndarray:
    if isinstance(p, TensorPolynomial):
        if not hasattr(rep, "eval_tensor"):
            raise InvalidInputError("bipartite polynomial needs a bipartite representation")
        return rep.eval_tensor(p)
    if isinstance(p, StarPolynomial):
        return rep.eval(p)
    raise InvalidInputError(f"cannot evaluate object of type {type(p).__name__}")


def clifford_rep(r: int, prefix: str = "b") -> Representation:
    """Pauli-chain images of r anticommuting self-adjoint unitaries, dimension 2^(r // 2)."""
    if r < 1:
        raise InvalidInputError("Clifford algebra needs r >= 1")
    m = r // 2
    imgs = {}
    for j in range(m):
        left = [SIGMA_Y] * j
        right = [ID2] * (m - j - 1)
        imgs[f"{prefix}{2 * j}"] = kron(*left, SIGMA_X, *right)
        imgs[f"{prefix}{2 * j + 1}"] = kron(*left, SIGMA_Z, *right)
    if r % 2:
        imgs[f"{prefix}{r - 1}"] = kron(*([SIGMA_Y] * m))
    return Representation.unitary(imgs)


def commutant_dim(rep: Representation, cfg: Config = DEFAULT) -> int:
    """Dimension of {T : T pi(g) = pi(g) T and T pi(g)* = pi(g)* T for all generators g}."""
    d = rep.dim
    I = np.eye(d)
    K = np.zeros((d * d, d * d), dtype=np.complex128)
    for A in rep.images.values():
        for B in (A, dagger(A)):
            # row-major vec: vec(B T) = (B (x) I) vec T, vec(T B) = (I (x) B^T) vec T
            C = np.kron(B, I) - np.kron(I, B.T)
            K += dagger(C) @ C
    w = eigvalsh(K, cfg)
    return int(np.sum(w <= 1e-9 * max(1.0, w[-1])))


def random_irrep(d: int, rng: np.random.Generator, ngens: int = 2, cfg: Config = DEFAULT) -> Representation:
    """Generic unitaries generate the full matrix algebra; resampled until the commutant is trivial."""
    for _ in range(100):
        rep = Representation({f"u{k}": random_unitary(d, rng) for k in range(ngens)}, "generic")
        if commutant_dim(rep, cfg) == 1:
            return rep
    raise PreconditionError(f"failed to sample an irreducible representation of dimension {d}")


def gns_from_irrep(rep: Representation, cfg: Config = DEFAULT) -> tuple[Representation, np.ndarray]:
    """(I_d (x) pi, |phi_d>) realising the normalised trace of an irreducible representation."""
    if commutant_dim(rep, cfg) != 1:
        raise PreconditionError("representation is reducible (commutant dimension > 1)")
    I = np.eye(rep.dim)
    big = Representation({k: np.kron(I, v) for k, v in rep.images.items()}, rep.kind, rep.pvm_groups, rep.orders)
    return big, maximally_entangled(rep.dim)


@dataclass
class TracialState:
    """tau(a) = tr(pi(a)) / d."""

    rep: Representation

    def __call__(self, p: StarPolynomial) -> complex:
        return complex(np.trace(self.rep.eval(p)) / self.rep.dim)

    def word(self, w: Word) -> complex:
        return complex(np.trace(self.rep.eval_word(w)) / self.rep.dim)


# determining pairs ---------------------------------------------------------------

@dataclass(frozen=True)
class RobustnessProfile:
    """nu(eps) = constant * eps ** exponent."""

    exponent: float = 0.25
    constant: float = 1.0
    name: str = ""

    def __call__(self, eps: float) -> float:
        return self.constant * max(eps, 0.0) ** self.exponent


@dataclass
class DeterminingPair:
    """Bob-side polynomials gamma[(x, a)] plus relations over Bob's generators.

    ``reduced_relations`` is an equivalent presentation after b^2 = 1 reduction
    and rescaling (XOR pairs only).
    """

    gamma: dict[tuple[int, int], StarPolynomial]
    relations: list[StarPolynomial]
    nu: RobustnessProfile = field(default_factory=RobustnessProfile)
    reduced_relations: list[StarPolynomial] | None = None
    name: str = ""

    def gamma_observables(self) -> dict[int, StarPolynomial]:
        """gamma^x_0 - gamma^x_1 rewritten through n^y_b = (1 + (-1)^b b_y)/2 (binary answers)."""
        xs = sorted({x for x, _ in self.gamma})
        names = sorted({n for p in self.gamma.values() for n in p.generators()})
        sub, obs = {}, set()
        for n in names:
            y, b = n[1:].split("_")
            sub[n] = (StarPolynomial.const(1.0) + (-1) ** int(b) * StarPolynomial.gen(bob_obs(int(y)))) * 0.5
            obs.add(bob_obs(int(y)))
        return {x: (self.gamma[(x, 0)] - self.gamma[(x, 1)]).substitute(sub).reduce_involutions(obs) for x in xs}

    def check_selfadjoint(self, selfadjoint: Iterable[str]) -> bool:
        return all(p.is_selfadjoint(selfadjoint) for p in self.gamma.values())


def synchronous_pair(G: SyncGame) -> DeterminingPair:
    """gamma^x_a = n^x_a; relations n^x_a n^y_b for every (a, b, x, y) with V = 0."""
    nA, nX = len(G.A), len(G.X)
    gamma = {(x, a): StarPolynomial.gen(bob_proj(x, a)) for x in range(nX) for a in range(nA)}
    rel = [StarPolynomial.word(bob_proj(x, a), bob_proj(y, b))
           for x, y, a, b in product(range(nX), range(nX), range(nA), range(nA)) if G.V[a, b, x, y] == 0]
    return DeterminingPair(gamma, rel, RobustnessProfile(0.25, name="sync"), name=f"sync:{G.name}")


def xor_pair(G: XorGame, biases, cfg: Config = DEFAULT) -> DeterminingPair:
    """gamma^i_a = (1 - (1/r_i) sum_j w_ij (1 - 2 n^j_a)) / 2 with relations (sum_j w_ij (n^j_0 - n^j_1))^2 - r_i^2."""
    r = np.asarray(biases[0] if isinstance(biases, tuple) else biases, dtype=float)
    omega = G.omega
    nI, nJ = omega.shape
    if r.shape != (nI,):
        raise InvalidInputError(f"expected {nI} row biases, got shape {r.shape}")
    if np.any(r <= cfg.norm_tol):
        raise DegeneracyError(f"vanishing XOR bias {r}")
    one = StarPolynomial.const(1.0)
    n = {(j, a): StarPolynomial.gen(bob_proj(j, a)) for j in range(nJ) for a in range(2)}
    gamma, rel, reduced = {}, [], []
    bnames = [bob_obs(j) for j in range(nJ)]
    for i in range(nI):
        for a in range(2):
            s = sum((omega[i, j] * (one - 2 * n[(j, a)]) for j in range(nJ)), StarPolynomial())
            gamma[(i, a)] = (one - s / r[i]) * 0.5
        lin = sum((omega[i, j] * (n[(j, 0)] - n[(j, 1)]) for j in range(nJ)), StarPolynomial())
        rel.append(lin * lin - r[i] ** 2)
        bl = sum((omega[i, j] * StarPolynomial.gen(bnames[j]) for j in range(nJ)), StarPolynomial())
        red = (bl * bl - r[i] ** 2).reduce_involutions(bnames)
        if not red.is_zero(1e-12):
            red = red.map_coeffs(lambda c: 0.0 if abs(c) < 1e-12 else c)
            lead = max(red.terms.values(), key=abs)
            red = red / (abs(lead) * np.sign(_first(red).real or 1.0))
            if all(not (red - q).is_zero(1e-12) for q in reduced):
                reduced.append(red)
    return DeterminingPair(gamma, rel, RobustnessProfile(0.25, name="xor"), reduced, name=f"xor:{G.name}")


def _first(p: StarPolynomial) -> complex:
    w = sorted(p.terms, key=lambda w: (len(w), w))[0]
    return p.terms[w]
