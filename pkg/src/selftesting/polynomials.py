"""Noncommutative *-polynomials over named generators.

A word is a tuple of letters ``(name, adjoint)``. Words are never reordered;
normalisation only prunes negligible coefficients and, on request, drops
adjoint flags of self-adjoint generators or cancels ``x x`` for involutions.

Text format: ``(0.5+0i)*b0*b1 + (0.5+0i)*b1*b0``, adjoint written ``b0'``.
Bipartite terms separate the two sides with `` (x) `` and write the empty word as ``1``.
"""
from __future__ import annotations

import re
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import InvalidInputError

Letter = tuple[str, bool]
Word = tuple[Letter, ...]

PRUNE = 1e-15
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def word_adjoint(w: Word) -> Word:
    return tuple((name, not adj) for name, adj in reversed(w))


def word_str(w: Word) -> str:
    return "*".join(name + ("'" if adj else "") for name, adj in w) if w else "1"


def _fmt_real(x: float) -> str:
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def format_coeff(c: complex) -> str:
    c = complex(c)
    im = c.imag
    sign = "-" if (im < 0 or (im == 0 and np.signbit(im))) else "+"
    return f"({_fmt_real(c.real)}{sign}{_fmt_real(abs(im))}i)"


def _normalise_word(w: Word, selfadjoint, involutions, idempotents) -> Word:
    letters = [(n, False) if n in selfadjoint else (n, a) for n, a in w]
    out: list[Letter] = []
    for letter in letters:
        if out and out[-1] == letter:
            name = letter[0]
            if name in involutions:
                out.pop()
                continue
            if name in idempotents:
                continue
        out.append(letter)
    return tuple(out)


class StarPolynomial:
    """Finite linear combination of words with complex coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Word, complex] | Iterable[tuple[Word, complex]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Word, complex] = {}
        for w, c in items:
            w = tuple((str(n), bool(a)) for n, a in w)
            acc[w] = acc.get(w, 0j) + complex(c)
        self.terms = {w: c for w, c in acc.items() if abs(c) > PRUNE}

    # constructors
    @classmethod
    def const(cls, c: complex = 1.0) -> "StarPolynomial":
        return cls({(): c})

    @classmethod
    def gen(cls, name: str, adjoint: bool = False) -> "StarPolynomial":
        return cls({((name, adjoint),): 1.0})

    @classmethod
    def word(cls, *names: str, coeff: complex = 1.0) -> "StarPolynomial":
        return cls({tuple((n, False) for n in names): coeff})

    # algebra
    def _coerce(self, other) -> "StarPolynomial":
        if isinstance(other, StarPolynomial):
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return StarPolynomial.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return StarPolynomial(list(self.terms.items()) + list(other.terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return StarPolynomial({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return StarPolynomial({w: c * other for w, c in self.terms.items()})
        if not isinstance(other, StarPolynomial):
            return NotImplemented
        out = []
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                out.append((w1 + w2, c1 * c2))
        return StarPolynomial(out)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        return self * (1.0 / other)

    def __pow__(self, k: int):
        out = StarPolynomial.const(1.0)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return (self - other).is_zero()

    def __hash__(self):
        return hash(frozenset((w, round(c.real, 12), round(c.imag, 12)) for w, c in self.terms.items()))

    def is_zero(self, tol: float = PRUNE) -> bool:
        return all(abs(c) <= tol for c in self.terms.values())

    def adjoint(self, selfadjoint: Iterable[str] = ()) -> "StarPolynomial":
        p = StarPolynomial({word_adjoint(w): np.conj(c) for w, c in self.terms.items()})
        return p.normalise(selfadjoint=selfadjoint) if selfadjoint else p

    def normalise(self, selfadjoint: Iterable[str] = (), involutions: Iterable[str] = (),
                  idempotents: Iterable[str] = ()) -> "StarPolynomial":
        """Drop adjoint flags of self-adjoint names; cancel ``xx`` (involutions) or merge it (idempotents)."""
        sa, inv, idem = set(selfadjoint), set(involutions), set(idempotents)
        return StarPolynomial([(_normalise_word(w, sa, inv, idem), c) for w, c in self.terms.items()])

    def reduce_involutions(self, names: Iterable[str]) -> "StarPolynomial":
        names = set(names)
        return self.normalise(selfadjoint=names, involutions=names)

    def is_selfadjoint(self, selfadjoint: Iterable[str] = (), tol: float = 1e-12) -> bool:
        sa = set(selfadjoint)
        return (self.normalise(selfadjoint=sa) - self.adjoint(selfadjoint=sa)).is_zero(tol)

    def substitute(self, mapping: Mapping[str, "StarPolynomial"]) -> "StarPolynomial":
        """Replace generators by polynomials; adjoint letters receive the adjoint image."""
        out = StarPolynomial()
        for w, c in self.terms.items():
            term = StarPolynomial.const(c)
            for name, adj in w:
                if name in mapping:
                    img = mapping[name]
                    term = term * (img.adjoint() if adj else img)
                else:
                    term = term * StarPolynomial.gen(name, adj)
            out = out + term
        return out

    def generators(self) -> set[str]:
        return {n for w in self.terms for n, _ in w}

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def constant(self) -> complex:
        return self.terms.get((), 0j)

    def map_coeffs(self, f: Callable[[complex], complex]) -> "StarPolynomial":
        return StarPolynomial({w: f(c) for w, c in self.terms.items()})

    # text format
    def __str__(self) -> str:
        if not self.terms:
            return "(0+0i)"
        parts = []
        for w, c in sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0])):
            parts.append(format_coeff(c) + ("" if not w else "*" + word_str(w)))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"StarPolynomial({str(self)!r})"

    @classmethod
    def parse(cls, text: str) -> "StarPolynomial":
        terms = _parse_sum(text, bipartite=False)
        return cls([(w, c) for (w,), c in terms])


class TensorPolynomial:
    """Element of the algebraic tensor product: terms keyed by ``(left word, right word)``."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[Word, Word], complex] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[tuple[Word, Word], complex] = {}
        for (wl, wr), c in items:
            key = (tuple((str(n), bool(a)) for n, a in wl), tuple((str(n), bool(a)) for n, a in wr))
            acc[key] = acc.get(key, 0j) + complex(c)
        self.terms = {k: c for k, c in acc.items() if abs(c) > PRUNE}

    @classmethod
    def tensor(cls, left: StarPolynomial, right: StarPolynomial) -> "TensorPolynomial":
        return cls([((wl, wr), cl * cr) for wl, cl in left.terms.items() for wr, cr in right.terms.items()])

    @classmethod
    def const(cls, c: complex = 1.0) -> "TensorPolynomial":
        return cls({((), ()): c})

    def __add__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            other = TensorPolynomial.const(other)
        if not isinstance(other, TensorPolynomial):
            return NotImplemented
        return TensorPolynomial(list(self.terms.items()) + list(other.terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return TensorPolynomial({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return TensorPolynomial({k: c * other for k, c in self.terms.items()})
        if not isinstance(other, TensorPolynomial):
            return NotImplemented
        return TensorPolynomial([((l1 + l2, r1 + r2), c1 * c2)
                                 for (l1, r1), c1 in self.terms.items()
                                 for (l2, r2), c2 in other.terms.items()])

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self * other
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, TensorPolynomial):
            return False
        return (self - other).is_zero()

    __hash__ = None

    def is_zero(self, tol: float = PRUNE) -> bool:
        return all(abs(c) <= tol for c in self.terms.values())

    def adjoint(self) -> "TensorPolynomial":
        return TensorPolynomial({(word_adjoint(l), word_adjoint(r)): np.conj(c)
                                 for (l, r), c in self.terms.items()})

    def normalise(self, selfadjoint=(), involutions=(), idempotents=()) -> "TensorPolynomial":
        sa, inv, idem = set(selfadjoint), set(involutions), set(idempotents)
        return TensorPolynomial([((_normalise_word(l, sa, inv, idem), _normalise_word(r, sa, inv, idem)), c)
                                 for (l, r), c in self.terms.items()])

    def substitute(self, left: Mapping[str, StarPolynomial] = {}, right: Mapping[str, StarPolynomial] = {}):
        out = TensorPolynomial()
        for (wl, wr), c in self.terms.items():
            pl = StarPolynomial({wl: 1.0}).substitute(left)
            pr = StarPolynomial({wr: 1.0}).substitute(right)
            out = out + TensorPolynomial.tensor(pl, pr) * c
        return out

    def generators(self) -> tuple[set[str], set[str]]:
        return ({n for (l, _) in self.terms for n, _a in l}, {n for (_, r) in self.terms for n, _a in r})

    def degree(self) -> tuple[int, int]:
        return (max((len(l) for l, _ in self.terms), default=0),
                max((len(r) for _, r in self.terms), default=0))

    def __len__(self) -> int:
        return len(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "(0+0i)"
        items = sorted(self.terms.items(), key=lambda t: (len(t[0][0]) + len(t[0][1]), t[0]))
        return " + ".join(f"{format_coeff(c)}*{word_str(l)} (x) {word_str(r)}" for (l, r), c in items)

    def __repr__(self) -> str:
        return f"TensorPolynomial({str(self)!r})"

    @classmethod
    def parse(cls, text: str) -> "TensorPolynomial":
        return cls([((l, r), c) for (l, r), c in _parse_sum(text, bipartite=True)])


# parsing ---------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.s = text
        self.i = 0

    def error(self, msg: str):
        raise InvalidInputError(f"polynomial parse error at column {self.i + 1}: {msg}")

    def ws(self):
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def peek(self, k: int = 1) -> str:
        return self.s[self.i:self.i + k]

    def eat(self, tok: str) -> bool:
        self.ws()
        if self.s.startswith(tok, self.i):
            self.i += len(tok)
            return True
        return False

    def number(self) -> complex:
        self.ws()
        if self.peek() == "(":
            depth, j = 0, self.i
            while j < len(self.s):
                depth += {"(": 1, ")": -1}.get(self.s[j], 0)
                if depth == 0:
                    break
                j += 1
            if j >= len(self.s):
                self.error("unbalanced parenthesis")
            body = self.s[self.i + 1:j].replace(" ", "")
            self.i = j + 1
            try:
                return complex(body.replace("i", "j"))
            except ValueError:
                self.error(f"bad coefficient {body!r}")
        m = re.compile(r"(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)i?").match(self.s, self.i)
        if not m:
            self.error("expected a number")
        self.i = m.end()
        tok = m.group(0)
        return complex(tok.replace("i", "j")) if tok.endswith("i") else complex(float(tok))

    def side(self) -> tuple[complex, Word]:
        coeff, word = 1 + 0j, []
        while True:
            self.ws()
            ch = self.peek()
            if ch == "(" or ch.isdigit() or ch == ".":
                coeff *= self.number()
            else:
                m = _IDENT.match(self.s, self.i)
                if not m:
                    self.error("expected a generator or coefficient")
                self.i = m.end()
                adj = False
                if self.peek() == "'":
                    adj, self.i = True, self.i + 1
                word.append((m.group(0), adj))
            if not self.eat("*"):
                return coeff, tuple(word)


def _parse_sum(text: str, bipartite: bool):
    p = _Parser(text)
    out = []
    sign = 1.0
    p.ws()
    if p.eat("-"):
        sign = -1.0
    elif p.eat("+"):
        pass
    while True:
        c1, w1 = _side_or_one(p)
        if bipartite:
            if not p.eat("(x)"):
                p.error("expected '(x)' between tensor factors")
            c2, w2 = _side_or_one(p)
            out.append(((w1, w2), sign * c1 * c2))
        else:
            out.append(((w1,), sign * c1))
        p.ws()
        if p.i >= len(p.s):
            return out
        if p.eat("+"):
            sign = 1.0
        elif p.eat("-"):
            sign = -1.0
        else:
            p.error("expected '+' or '-'")


def _side_or_one(p: _Parser):
    p.ws()
    if p.peek() == "1" and not re.match(r"1[\d.eE]", p.s[p.i:p.i + 2]):
        # the bare unit "1" is the empty word
        p.i += 1
        if p.eat("*"):
            c, w = p.side()
            return c, w
        return 1 + 0j, ()
    return p.side()
