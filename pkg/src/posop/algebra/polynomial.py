"""Noncommutative polynomials over the operator generators.

An :class:`NCPolynomial` is an element of the free algebra: a finite sum of
ordered words with exact scalar weights.  Scalars carry integer powers of the
mass symbol ``m`` and of the time parameter ``t`` next to a Gaussian-rational
number, so a term is keyed by ``(word, m_power, t_power)``.

Nothing here knows about commutation relations; ordering words into a
canonical form is the job of :mod:`posop.algebra.rewrite`.
"""
from __future__ import annotations

import re
from enum import IntEnum
from fractions import Fraction
from typing import Dict, Iterable, Iterator, Mapping, Tuple

from ..errors import ParseError
from .scalars import GaussianRational, ONE


class Generator(IntEnum):
    """Operator generators, declared in the canonical ordering.

    ``W`` stands for ``(H + m)^-1``.
    """

    H = 0
    W = 1
    P1 = 2
    P2 = 3
    P3 = 4
    S1 = 5
    S2 = 6
    S3 = 7
    Q1 = 8
    Q2 = 9
    Q3 = 10
    J1 = 11
    J2 = 12
    J3 = 13
    K1 = 14
    K2 = 15
    K3 = 16

    @property
    def family(self) -> str:
        return self.name[0]

    @property
    def index(self) -> int:
        """Vector component 1..3, or 0 for H and W."""
        return int(self.name[1]) if len(self.name) == 2 else 0


def vector_generators(family: str) -> Tuple[Generator, Generator, Generator]:
    return tuple(Generator[f"{family}{i}"] for i in (1, 2, 3))


Word = Tuple[Tuple[int, int], ...]
TermKey = Tuple[Word, int, int]


def make_word(factors: Iterable[Tuple[int, int]]) -> Word:
    """Merge adjacent equal generators and drop zero powers."""
    out: list[list[int]] = []
    for g, p in factors:
        g = int(g)
        if p == 0:
            continue
        if out and out[-1][0] == g:
            out[-1][1] += p
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append([g, p])
    for g, p in out:
        if p < 0 and g != Generator.H:
            raise ValueError(f"negative power of {Generator(g).name} is not allowed")
    return tuple((g, p) for g, p in out)


def word_degree(word: Word) -> int:
    """Number of non-H factors; powers of H carry no degree."""
    return sum(abs(p) for g, p in word if g != Generator.H)


class NCPolynomial:
    """Immutable exact sum of scalar-weighted words."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[TermKey, GaussianRational] | None = None):
        clean: Dict[TermKey, GaussianRational] = {}
        if terms:
            for key, c in terms.items():
                c = GaussianRational.coerce(c)
                if c:
                    clean[key] = c
        self._terms = clean
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def _raw(cls, terms: Dict[TermKey, GaussianRational]) -> "NCPolynomial":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def word(cls, factors: Iterable[Tuple[int, int]], coeff=ONE, m: int = 0, t: int = 0) -> "NCPolynomial":
        return cls({(make_word(factors), m, t): GaussianRational.coerce(coeff)})

    @classmethod
    def gen(cls, g: Generator | str, power: int = 1) -> "NCPolynomial":
        if isinstance(g, str):
            g = Generator[g]
        return cls.word([(g, power)])

    @classmethod
    def scalar(cls, coeff=ONE, m: int = 0, t: int = 0) -> "NCPolynomial":
        return cls({((), m, t): GaussianRational.coerce(coeff)})

    @classmethod
    def zero(cls) -> "NCPolynomial":
        return cls._raw({})

    # inspection ---------------------------------------------------------
    @property
    def terms(self) -> Mapping[TermKey, GaussianRational]:
        return self._terms

    def items(self) -> Iterator[Tuple[TermKey, GaussianRational]]:
        return iter(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def degree(self) -> int:
        if not self._terms:
            return 0
        return max(word_degree(w) for w, _, _ in self._terms)

    def generators(self) -> set[Generator]:
        return {Generator(g) for w, _, _ in self._terms for g, _ in w}

    def max_abs_h_power(self) -> int:
        return max((abs(p) for w, _, _ in self._terms for g, p in w if g == Generator.H), default=0)

    # algebra ------------------------------------------------------------
    def __add__(self, other) -> "NCPolynomial":
        other = _as_poly(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k)
            v = c if v is None else v + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return NCPolynomial._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "NCPolynomial":
        return NCPolynomial._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> "NCPolynomial":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "NCPolynomial":
        return _as_poly(other) - self

    def __mul__(self, other) -> "NCPolynomial":
        other = _as_poly(other)
        out: Dict[TermKey, GaussianRational] = {}
        for (w1, m1, t1), c1 in self._terms.items():
            for (w2, m2, t2), c2 in other._terms.items():
                key = (make_word(w1 + w2), m1 + m2, t1 + t2)
                v = out.get(key)
                c = c1 * c2
                v = c if v is None else v + c
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        return NCPolynomial._raw(out)

    def __rmul__(self, other) -> "NCPolynomial":
        return _as_poly(other) * self

    def __pow__(self, n: int) -> "NCPolynomial":
        if n < 0:
            raise ValueError("negative powers of polynomials are not defined")
        out = NCPolynomial.scalar(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        try:
            other = _as_poly(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def map_terms(self, fn) -> "NCPolynomial":
        """Rebuild from ``fn(word, m, t, coeff) -> (word, m, t, coeff)``."""
        out: Dict[TermKey, GaussianRational] = {}
        for (w, m, t), c in self._terms.items():
            w2, m2, t2, c2 = fn(w, m, t, c)
            key = (make_word(w2), m2, t2)
            v = out.get(key)
            v = c2 if v is None else v + c2
            if v:
                out[key] = v
            else:
                out.pop(key, None)
        return NCPolynomial._raw(out)

    def substitute(self, mapping: Mapping[Generator, "NCPolynomial"]) -> "NCPolynomial":
        """Replace generators by polynomials (positive powers only for mapped ones)."""
        out = NCPolynomial.zero()
        for (w, m, t), c in self._terms.items():
            acc = NCPolynomial.scalar(c, m, t)
            for g, p in w:
                g = Generator(g)
                if g in mapping:
                    if p < 0:
                        raise ValueError(f"cannot substitute into negative power of {g.name}")
                    acc = acc * mapping[g] ** p
                else:
                    acc = acc * NCPolynomial.gen(g, p)
            out = out + acc
        return out

    # text ---------------------------------------------------------------
    def to_text(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(_term_text(k, c) for k, c in sorted(self._terms.items(), key=_sort_key))

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"NCPolynomial<{self.to_text()}>"

    @classmethod
    def parse(cls, text: str) -> "NCPolynomial":
        return parse_polynomial(text)


def _as_poly(x) -> NCPolynomial:
    if isinstance(x, NCPolynomial):
        return x
    if isinstance(x, (int, Fraction, GaussianRational)):
        return NCPolynomial.scalar(x)
    raise TypeError(f"cannot convert {type(x).__name__} to NCPolynomial")


def _sort_key(item):
    (w, m, t), _ = item
    return (word_degree(w), len(w), w, m, t)


def _word_text(word: Word) -> str:
    if not word:
        return "1"
    parts = []
    for g, p in word:
        name = Generator(g).name
        parts.append(name if p == 1 else f"{name}^{p}")
    return " ".join(parts)


def _term_text(key: TermKey, c: GaussianRational) -> str:
    w, m, t = key
    return f"{c.text()} m^{m} t^{t} : {_word_text(w)}"


_TERM_RE = re.compile(
    r"\(\s*(?P<re>-?\d+(?:/\d+)?)\s*(?P<sign>[+-])\s*(?P<im>\d+(?:/\d+)?)i\s*\)"
    r"\s*m\^(?P<m>-?\d+)\s*t\^(?P<t>-?\d+)\s*:\s*(?P<word>[A-Z0-9^\- ]+?)\s*$"
)
_FACTOR_RE = re.compile(r"^(?P<g>[A-Z][0-9]?)(?:\^(?P<p>-?\d+))?$")


def _split_terms(text: str) -> list[str]:
    parts, depth, start = [], 0, 0
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and text.startswith(" + ", i):
            parts.append(text[start:i])
            start = i + 3
            i += 3
            continue
        i += 1
    parts.append(text[start:])
    return parts


def parse_polynomial(text: str) -> NCPolynomial:
    """Inverse of :meth:`NCPolynomial.to_text`."""
    text = text.strip()
    if text == "0":
        return NCPolynomial.zero()
    terms: Dict[TermKey, GaussianRational] = {}
    for chunk in _split_terms(text):
        mt = _TERM_RE.match(chunk.strip())
        if not mt:
            raise ParseError(f"malformed term: {chunk!r}")
        im = Fraction(mt["im"])
        if mt["sign"] == "-":
            im = -im
        coeff = GaussianRational(Fraction(mt["re"]), im)
        factors = []
        wtxt = mt["word"].strip()
        if wtxt != "1":
            for tok in wtxt.split():
                mf = _FACTOR_RE.match(tok)
                if not mf or mf["g"] not in Generator.__members__:
                    raise ParseError(f"unknown factor {tok!r}")
                factors.append((Generator[mf["g"]], int(mf["p"] or 1)))
        key = (make_word(factors), int(mt["m"]), int(mt["t"]))
        terms[key] = terms.get(key, GaussianRational(0)) + coeff
    return NCPolynomial(terms)


def gens(family: str) -> Tuple[NCPolynomial, NCPolynomial, NCPolynomial]:
    """The three components of a vector generator as polynomials."""
    return tuple(NCPolynomial.gen(g) for g in vector_generators(family))


H = NCPolynomial.gen(Generator.H)
H_INV = NCPolynomial.gen(Generator.H, -1)
W = NCPolynomial.gen(Generator.W)
P = gens("P")
S = gens("S")
Q = gens("Q")
J = gens("J")
K = gens("K")
M = NCPolynomial.scalar(1, m=1)
M_INV = NCPolynomial.scalar(1, m=-1)
T = NCPolynomial.scalar(1, t=1)
IMAG = NCPolynomial.scalar(GaussianRational(0, 1))


def dot(a, b) -> NCPolynomial:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def cross(a, b) -> tuple:
    """Componentwise ``(a x b)_i = eps_ijk a_j b_k`` with factor order kept."""
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def levi_civita(i: int, j: int, k: int) -> int:
    """Totally antisymmetric symbol on 0-based indices."""
    return (i - j) * (j - k) * (k - i) // 2
