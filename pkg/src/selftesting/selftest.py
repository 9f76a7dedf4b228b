"""Spectral gaps, local dilations, the quantitative dilation bound, pair residuals and sweeps."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .algebras import DeterminingPair
from .config import DEFAULT, Config
from .errors import DegenerateGapError, InvalidInputError, PreconditionError
from .games import as_game, game_polynomial, winning_probability
from .linalg import dagger, eigvalsh, frobenius, rho_norm, sqrtm_psd
from .polynomials import TensorPolynomial
from .strategies import QuantumModel, is_projective


@dataclass
class GapReport:
    topValue: float
    gap: float
    topMultiplicity: int
    eigenvalues: np.ndarray = field(repr=False, default=None)

    @property
    def degenerate(self) -> bool:
        return self.gap == 0.0

    def as_dict(self) -> dict:
        return {"topValue": self.topValue, "gap": self.gap, "topMultiplicity": self.topMultiplicity,
                "degenerate": self.degenerate}


def spectral_gap(G, ideal_rep, poly: TensorPolynomial | None = None, cfg: Config = DEFAULT) -> GapReport:
    """Top eigenvalue of the game polynomial under ``ideal_rep``, its multiplicity and the gap below it."""
    poly = game_polynomial(G) if poly is None else poly
    M = ideal_rep.eval_tensor(poly)
    w = eigvalsh(0.5 * (M + dagger(M)), cfg)
    top = float(w[-1])
    mult = int(np.sum(w >= top - 1e-9))
    below = w[w < top - 1e-9]
    gap = float(top - below[-1]) if below.size else 0.0
    return GapReport(top, gap, mult, w)


def top_eigenspace_check(G, ideal_rep, poly: TensorPolynomial | None = None, cfg: Config = DEFAULT) -> bool:
    return spectral_gap(G, ideal_rep, poly, cfg).topMultiplicity == 1


# local dilations ------------------------------------------------------------------

@dataclass
class LocalDilation:
    """Isometries IA : C^dA -> C^dA~ (x) C^rA, IB likewise, and an auxiliary state on C^rA (x) C^rB."""

    IA: np.ndarray
    IB: np.ndarray
    aux: np.ndarray
    rA: int
    rB: int

    def __post_init__(self):
        self.IA = np.asarray(self.IA, dtype=np.complex128)
        self.IB = np.asarray(self.IB, dtype=np.complex128)
        self.aux = np.asarray(self.aux, dtype=np.complex128).reshape(-1)
        for name, I in (("IA", self.IA), ("IB", self.IB)):
            res = np.max(np.abs(dagger(I) @ I - np.eye(I.shape[1])), initial=0.0)
            if res > 1e-10:
                raise InvalidInputError(f"{name} is not an isometry (residual {res:.3e})")
        if self.aux.size != self.rA * self.rB:
            raise InvalidInputError(f"aux: expected dimension {self.rA * self.rB}, got {self.aux.size}")
        if abs(np.linalg.norm(self.aux) - 1) > 1e-10:
            raise InvalidInputError("aux must be a unit vector")
        if self.IA.shape[0] % self.rA or self.IB.shape[0] % self.rB:
            raise InvalidInputError("isometry output dimension is not a multiple of the ancilla dimension")


def _dilate(v: np.ndarray, IA: np.ndarray, IB: np.ndarray, rA: int, rB: int) -> np.ndarray:
    """(IA (x) IB) v, reordered to (dA~ dB~) x (rA rB) matrix form."""
    dA, dB = IA.shape[1], IB.shape[1]
    W = IA @ v.reshape(dA, dB) @ IB.T
    tA, tB = IA.shape[0] // rA, IB.shape[0] // rB
    return W.reshape(tA, rA, tB, rB).transpose(0, 2, 1, 3).reshape(tA * tB, rA * rB)


def _apply_local(A: np.ndarray, B: np.ndarray, psi: np.ndarray, dA: int, dB: int) -> np.ndarray:
    return (A @ psi.reshape(dA, dB) @ B.T).reshape(-1)


@dataclass
class DilationReport:
    state: np.ndarray         # residuals indexed [a, b, x, y]
    aliceResiduals: np.ndarray  # [x, a]
    bobResiduals: np.ndarray    # [y, b]
    stateResidual: float

    @property
    def eps(self) -> float:
        return float(max(self.state.max(initial=0.0), self.aliceResiduals.max(initial=0.0),
                         self.bobResiduals.max(initial=0.0), self.stateResidual))


def verify_local_dilation(S: QuantumModel, St: QuantumModel, D: LocalDilation) -> DilationReport:
    """Residuals of I_A (x) I_B applied to psi, M psi, N psi and M N psi against the ideal times aux."""
    if D.IA.shape[1] != S.dA or D.IB.shape[1] != S.dB:
        raise InvalidInputError("isometry input dimensions do not match the model")
    if D.IA.shape[0] != St.dA * D.rA or D.IB.shape[0] != St.dB * D.rB:
        raise InvalidInputError("isometry output dimensions do not match the ideal model and ancillas")
    if S.shape != St.shape:
        raise InvalidInputError("models have different question/answer shapes")
    nA, nB, nX, nY = S.shape
    IdA, IdB = np.eye(S.dA), np.eye(S.dB)
    tIA, tIB = np.eye(St.dA), np.eye(St.dB)

    def res(A, B, tA, tB):
        left = _dilate(_apply_local(A, B, S.psi, S.dA, S.dB), D.IA, D.IB, D.rA, D.rB)
        right = np.outer(_apply_local(tA, tB, St.psi, St.dA, St.dB), D.aux)
        return float(np.linalg.norm(left - right))

    state = np.zeros((nA, nB, nX, nY))
    for a in range(nA):
        for b in range(nB):
            for x in range(nX):
                for y in range(nY):
                    state[a, b, x, y] = res(S.alice[x, a], S.bob[y, b], St.alice[x, a], St.bob[y, b])
    alice = np.array([[res(S.alice[x, a], IdB, St.alice[x, a], tIB) for a in range(nA)] for x in range(nX)])
    bob = np.array([[res(IdA, S.bob[y, b], tIA, St.bob[y, b]) for b in range(nB)] for y in range(nY)])
    return DilationReport(state, alice, bob, res(IdA, IdB, tIA, tIB))


# the quantitative bound -------------------------------------------------------------

@dataclass
class DilationBound:
    delta: float
    eps: float
    bound: float
    aux: np.ndarray
    achieved: float
    gap: float
    deltaA: np.ndarray = field(repr=False, default=None)   # [x, a]
    deltaB: np.ndarray = field(repr=False, default=None)   # [y, b]
    termResiduals: np.ndarray = field(repr=False, default=None)  # [a, b, x, y]
    termBounds: np.ndarray = field(repr=False, default=None)     # [a, b, x, y]
    rawEps: float = 0.0


def _compressed_deviation(I: np.ndarray, tilde: np.ndarray, actual: np.ndarray, r: int, rho: np.ndarray) -> float:
    return rho_norm(dagger(I) @ np.kron(tilde, np.eye(r)) @ I - actual, rho)


def dilation_bound(S: QuantumModel, ideal: QuantumModel, IA: np.ndarray, IB: np.ndarray, G,
                   gap: float | None = None, w_q: float | None = None, cfg: Config = DEFAULT) -> DilationBound:
    """delta, eps = w_q - w(S), bound = sqrt2 (delta + sqrt eps) / gap, the optimal aux and the achieved distance.

    ``gap`` and ``w_q`` default to the spectral data of the ideal model's representation.
    """
    g = as_game(G)
    if gap is None or w_q is None:
        rep = spectral_gap(g, ideal.bipartite_rep(), cfg=cfg)
        if rep.topMultiplicity > 1:
            raise DegenerateGapError(f"top eigenvalue has multiplicity {rep.topMultiplicity}")
        gap = rep.gap if gap is None else gap
        w_q = rep.topValue if w_q is None else w_q
    if gap <= 0:
        raise DegenerateGapError("spectral gap is zero; the dilation bound is undefined")
    IA, IB = np.asarray(IA, dtype=np.complex128), np.asarray(IB, dtype=np.complex128)
    if IA.shape[1] != S.dA or IB.shape[1] != S.dB:
        raise InvalidInputError("isometry input dimensions do not match the model")
    if IA.shape[0] % ideal.dA or IB.shape[0] % ideal.dB:
        raise InvalidInputError("isometry output dimensions are not multiples of the ideal dimensions")
    rA, rB = IA.shape[0] // ideal.dA, IB.shape[0] // ideal.dB
    nA, nB, nX, nY = S.shape
    rhoA, rhoB = S.rho_A(), S.rho_B()
    dA_ = np.array([[_compressed_deviation(IA, ideal.alice[x, a], S.alice[x, a], rA, rhoA)
                     for a in range(nA)] for x in range(nX)])
    dB_ = np.array([[_compressed_deviation(IB, ideal.bob[y, b], S.bob[y, b], rB, rhoB)
                     for b in range(nB)] for y in range(nY)])
    W = g.weights()
    pair = dA_.T[:, None, :, None] + dB_.T[None, :, None, :]
    delta = float(np.sum(W * pair))
    raw = w_q - winning_probability(g, S.correlation(check=False))
    eps = 0.0 if raw < cfg.eps_floor else float(raw)
    bound = np.sqrt(2.0) * (delta + np.sqrt(eps)) / gap

    T = _dilate(S.psi, IA, IB, rA, rB)
    w = T.T @ np.conj(ideal.psi)
    nw = np.linalg.norm(w)
    aux = w / nw if nw > 0 else np.eye(rA * rB, 1).reshape(-1).astype(np.complex128)
    achieved = float(np.linalg.norm(T - np.outer(ideal.psi, aux)))

    terms = np.zeros((nA, nB, nX, nY))
    for a in range(nA):
        for b in range(nB):
            for x in range(nX):
                for y in range(nY):
                    left = _dilate(_apply_local(S.alice[x, a], S.bob[y, b], S.psi, S.dA, S.dB), IA, IB, rA, rB)
                    right = np.outer(_apply_local(ideal.alice[x, a], ideal.bob[y, b], ideal.psi, ideal.dA, ideal.dB), aux)
                    terms[a, b, x, y] = np.linalg.norm(left - right)
    return DilationBound(delta, eps, float(bound), aux, achieved, float(gap), dA_, dB_, terms,
                         pair + bound, float(raw))


# determining-pair residuals -----------------------------------------------------------

@dataclass
class PairResiduals:
    condI: float
    condII: float
    condIII: float
    detailI: dict = field(default_factory=dict, repr=False)
    detailII: list = field(default_factory=list, repr=False)


def pair_robustness_residuals(S: QuantumModel, pair: DeterminingPair, which: str = "relations",
                              cfg: Config = DEFAULT) -> PairResiduals:
    """condI: |(M (x) 1 - 1 (x) gamma(N)) psi|; condII: |pi_B(r)|_rhoB; condIII: |[N, sqrt rhoB]|_F."""
    if not is_projective(S, cfg):
        raise PreconditionError("pair residuals need a projective model")
    rels = pair.relations if which == "relations" else pair.reduced_relations
    if rels is None:
        raise InvalidInputError(f"pair has no {which!r}")
    bob = S.bob_rep()
    Psi = S.psi_matrix()
    rhoB = S.rho_B()
    detail = {}
    for (x, a), gam in pair.gamma.items():
        Gm = bob.eval(gam)
        detail[(x, a)] = frobenius(S.alice[x, a] @ Psi - Psi @ Gm.T)
    rel_res = [rho_norm(bob.eval(r), rhoB) for r in rels]
    sq = sqrtm_psd(rhoB, cfg)
    c3 = max(frobenius(N @ sq - sq @ N) for N in S.bob.reshape(-1, S.dB, S.dB))
    return PairResiduals(max(detail.values(), default=0.0), max(rel_res, default=0.0), float(c3), detail, rel_res)


# sweeps ---------------------------------------------------------------------------

@dataclass
class SweepRow:
    param: float
    eps: float
    condI: float
    condII: float
    condIII: float
    delta: float
    bound: float
    achieved: float

    FIELDS = ("param", "eps", "condI", "condII", "condIII", "delta", "bound", "achieved")

    def values(self) -> list[float]:
        return [getattr(self, f) for f in self.FIELDS]


@dataclass
class PowerFit:
    exponent: float
    constant: float
    points: int

    def as_dict(self) -> dict:
        return {"exponent": self.exponent, "constant": self.constant, "points": self.points}


def power_fit(x: Sequence[float], y: Sequence[float], floor: float = 1e-13) -> PowerFit | None:
    """Least-squares fit of log y = e log x + log C over points with x, y above ``floor``."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    mask = (x > floor) & (y > floor)
    if mask.sum() < 2:
        return None
    e, logc = np.polyfit(np.log(x[mask]), np.log(y[mask]), 1)
    return PowerFit(float(e), float(np.exp(logc)), int(mask.sum()))


@dataclass
class SweepReport:
    rows: list[SweepRow]
    fits: dict[str, PowerFit | None]
    family: str = ""
    gap: float = 0.0
    w_q: float = 0.0

    def all_within_bound(self, slack: float = 1e-8) -> bool:
        return all(r.achieved <= r.bound + slack for r in self.rows)


def robustness_sweep(G, pair: DeterminingPair, ideal: QuantumModel, family: Callable,
                     params: Iterable[float], cfg: Config = DEFAULT) -> SweepReport:
    """One row per parameter: ``family(param)`` returns ``(model, IA, IB)``. Rows are sorted by eps."""
    params = list(params)
    if not params:
        raise InvalidInputError("perturbation schedule is empty")
    spec = spectral_gap(G, ideal.bipartite_rep(), cfg=cfg)
    if spec.topMultiplicity > 1 or spec.gap <= 0:
        raise DegenerateGapError("ideal representation has a degenerate top eigenvalue")
    rows = []
    for t in params:
        S, IA, IB = family(t)
        db = dilation_bound(S, ideal, IA, IB, G, gap=spec.gap, w_q=spec.topValue, cfg=cfg)
        pr = pair_robustness_residuals(S, pair, cfg=cfg)
        rows.append(SweepRow(float(t), db.eps, pr.condI, pr.condII, pr.condIII, db.delta, db.bound, db.achieved))
    rows.sort(key=lambda r: (r.eps, r.param))
    eps = [r.eps for r in rows]
    fits = {k: power_fit(eps, [getattr(r, k) for r in rows])
            for k in ("achieved", "condI", "condII", "condIII", "delta", "bound")}
    return SweepReport(rows, fits, getattr(family, "name", ""), spec.gap, spec.topValue)
