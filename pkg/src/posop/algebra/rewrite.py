"""Normal forms, commutators, adjoints and discrete symmetries.

Every normal word has the shape ``H^a W^b P1^c P2^d P3^e  X1 X2 ... Xn``: a
commutative block of "functions of momentum" followed by a sorted tail of
the remaining primitives (``S, Q`` in massive mode, ``J, K`` in massless
mode).  In both modes every tail letter acts on the commutative block as a
derivation and the tail letters close among themselves linearly, so the
rewriting ``XY -> YX + [X,Y]`` splits into two local moves:

* pushing a commutative monomial left through a tail letter,
  ``x f = f x + [x, f]``;
* bubbling a tail letter into sorted position, ``y x = x y + [y, x]``.

Commutators with ``H^-n`` come from ``[X, H^-1] = -H^-1 [X, H] H^-1``, which
for a derivation is just the power rule with a negative exponent.
"""
from __future__ import annotations

from collections import defaultdict
from typing import Dict, Iterable, Tuple

from ..errors import BudgetExceeded, UnknownGenerator
from .polynomial import Generator, NCPolynomial, make_word
from .relations import COMMUTATIVE, Mode, ModeRelations, relations_for
from .scalars import GaussianRational, ONE

DEFAULT_BUDGET = 10 ** 7

# position of each commutative generator inside a block exponent tuple
_COMM_INDEX = {Generator.H: 0, Generator.W: 1, Generator.P1: 2, Generator.P2: 3, Generator.P3: 4}
_COMM_ORDER = (Generator.H, Generator.W, Generator.P1, Generator.P2, Generator.P3)
_UNIT = (0, 0, 0, 0, 0)

Comm = Tuple[int, int, int, int, int]
Tail = Tuple[int, ...]
NKey = Tuple[Comm, Tail, int, int]
Normalized = Dict[NKey, GaussianRational]


def _add_into(acc: dict, key, c) -> None:
    v = acc.get(key)
    v = c if v is None else v + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


def _madd(a: Comm, b: Comm) -> Comm:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3], a[4] + b[4])


class Engine:
    """Compiled rewriting data for one mode.  Caches are pure memo tables."""

    def __init__(self, rel: ModeRelations):
        self.rel = rel
        self.tail_letters = frozenset(int(g) for g in rel.tail_generators)
        self.steps = 0
        self.budget = DEFAULT_BUDGET
        # derivation of each comm variable under each tail letter
        self._deriv: Dict[int, Dict[int, Tuple[Tuple[Comm, GaussianRational], ...]]] = {}
        for x in rel.tail_generators:
            per_var = {}
            for v in _COMM_ORDER:
                if v not in rel.primitives:
                    continue
                entry = rel.commutator_table[(x, v)]
                per_var[_COMM_INDEX[v]] = tuple(self._as_comm_terms(entry))
            self._deriv[int(x)] = per_var
        # brackets between tail letters, y > x
        self._lie: Dict[Tuple[int, int], Tuple[Tuple[int, GaussianRational], ...]] = {}
        for y in rel.tail_generators:
            for x in rel.tail_generators:
                if y > x:
                    entry = rel.commutator_table[(y, x)]
                    lin = []
                    for (w, m, t), c in entry.items():
                        if len(w) != 1 or w[0][1] != 1 or m or t or Generator(w[0][0]) in COMMUTATIVE:
                            raise ValueError("tail brackets must be linear in tail letters")
                        lin.append((w[0][0], c))
                    self._lie[(int(y), int(x))] = tuple(lin)
        self._push_cache: Dict[Tuple[Tail, Comm], Tuple] = {}
        self._ins_cache: Dict[Tuple[Tail, int], Tuple] = {}
        self._dcache: Dict[Tuple[int, Comm], Tuple] = {}

    @staticmethod
    def _as_comm_terms(poly: NCPolynomial) -> Iterable[Tuple[Comm, GaussianRational]]:
        for (w, m, t), c in poly.items():
            if m or t:
                raise ValueError("derivation images must be free of m and t")
            e = [0, 0, 0, 0, 0]
            for g, p in w:
                g = Generator(g)
                if g not in COMMUTATIVE:
                    raise ValueError("derivation images must be commutative")
                e[_COMM_INDEX[g]] += p
            yield tuple(e), c

    def _tick(self, n: int = 1) -> None:
        self.steps += n
        if self.steps > self.budget:
            raise BudgetExceeded(f"rewrite budget of {self.budget} steps exceeded")

    # local moves -------------------------------------------------------
    def derive(self, x: int, f: Comm) -> Tuple[Tuple[Comm, GaussianRational], ...]:
        """``[x, f]`` for a tail letter x and commutative monomial f."""
        key = (x, f)
        hit = self._dcache.get(key)
        if hit is not None:
            return hit
        self._tick()
        out: dict = {}
        rules = self._deriv[x]
        for v, e in enumerate(f):
            if not e:
                continue
            images = rules.get(v, ())
            if not images:
                continue
            base = list(f)
            base[v] -= 1
            base = tuple(base)
            for mono, c in images:
                _add_into(out, _madd(base, mono), c * e)
        res = tuple(out.items())
        self._dcache[key] = res
        return res

    def push(self, tail: Tail, f: Comm) -> Tuple[Tuple[Tuple[Comm, Tail], GaussianRational], ...]:
        """Rewrite ``tail * f`` as a sum of ``f' * tail'``."""
        key = (tail, f)
        hit = self._push_cache.get(key)
        if hit is not None:
            return hit
        state: dict = {(f, ()): ONE}
        for x in reversed(tail):
            new: dict = {}
            for (g, suf), c in state.items():
                _add_into(new, (g, (x,) + suf), c)
                for g2, c2 in self.derive(x, g):
                    _add_into(new, (g2, suf), c * c2)
            state = new
        res = tuple(state.items())
        self._push_cache[key] = res
        return res

    def insert(self, tail: Tail, x: int) -> Tuple[Tuple[Tail, GaussianRational], ...]:
        """Rewrite ``tail * x`` (tail sorted) as a sum of sorted tails."""
        if not tail or tail[-1] <= x:
            return ((tail + (x,), ONE),)
        key = (tail, x)
        hit = self._ins_cache.get(key)
        if hit is not None:
            return hit
        self._tick()
        y, rest = tail[-1], tail[:-1]
        out: dict = {}
        for t1, c1 in self.insert(rest, x):
            for t2, c2 in self.insert(t1, y):
                _add_into(out, t2, c1 * c2)
        for z, cz in self._lie[(y, x)]:
            for t1, c1 in self.insert(rest, z):
                _add_into(out, t1, cz * c1)
        res = tuple(out.items())
        self._ins_cache[key] = res
        return res

    def tail_product(self, a: Tail, b: Tail) -> Dict[Tail, GaussianRational]:
        state: dict = {a: ONE}
        for x in b:
            new: dict = {}
            for t, c in state.items():
                for t2, c2 in self.insert(t, x):
                    _add_into(new, t2, c * c2)
            state = new
        return state

    # element-level operations ------------------------------------------
    def times_comm(self, elem: Normalized, f: Comm) -> Normalized:
        out: Normalized = {}
        for (comm, tail, m, t), c in elem.items():
            for (g, tail2), c2 in self.push(tail, f):
                _add_into(out, (_madd(comm, g), tail2, m, t), c * c2)
        return out

    def times_letter(self, elem: Normalized, x: int) -> Normalized:
        out: Normalized = {}
        for (comm, tail, m, t), c in elem.items():
            for tail2, c2 in self.insert(tail, x):
                _add_into(out, (comm, tail2, m, t), c * c2)
        return out

    def multiply(self, a: Normalized, b: Normalized) -> Normalized:
        out: Normalized = {}
        for (ca, ta, ma, sa), xa in a.items():
            for (cb, tb, mb, sb), xb in b.items():
                for (g, t1), c1 in self.push(ta, cb):
                    comm = _madd(ca, g)
                    for t2, c2 in self.tail_product(t1, tb).items():
                        _add_into(out, (comm, t2, ma + mb, sa + sb), xa * xb * c1 * c2)
        return out

    def normalize(self, expr: NCPolynomial) -> Normalized:
        prims = self.rel.primitives
        out: Normalized = {}
        for (word, m, t), c in expr.items():
            elem: Normalized = {(_UNIT, (), m, t): c}
            for g, p in word:
                gen = Generator(g)
                if gen not in prims:
                    raise UnknownGenerator(f"{gen.name} is not primitive in {self.rel.mode.value} mode")
                if gen in COMMUTATIVE:
                    e = [0, 0, 0, 0, 0]
                    e[_COMM_INDEX[gen]] = p
                    elem = self.times_comm(elem, tuple(e))
                else:
                    for _ in range(p):
                        elem = self.times_letter(elem, g)
            for key, v in elem.items():
                _add_into(out, key, v)
        return out


def to_polynomial(elem: Normalized) -> NCPolynomial:
    terms = {}
    for (comm, tail, m, t), c in elem.items():
        factors = [(g, e) for g, e in zip(_COMM_ORDER, comm) if e]
        factors.extend((x, 1) for x in tail)
        key = (make_word(factors), m, t)
        terms[key] = terms.get(key, GaussianRational(0)) + c
    return NCPolynomial(terms)


def split_word(word) -> Tuple[Comm, Tail]:
    """Inverse of the word layout used by :func:`to_polynomial` (normal words only)."""
    e = [0, 0, 0, 0, 0]
    tail = []
    for g, p in word:
        gen = Generator(g)
        if gen in COMMUTATIVE:
            e[_COMM_INDEX[gen]] += p
        else:
            tail.extend([g] * p)
    return tuple(e), tuple(tail)


def from_polynomial(poly: NCPolynomial) -> Normalized:
    """Read an already-normal polynomial back into engine layout."""
    out: Normalized = {}
    for (w, m, t), c in poly.items():
        comm, tail = split_word(w)
        _add_into(out, (comm, tail, m, t), c)
    return out


_ENGINES: Dict[Mode, Engine] = {}


def engine_for(rel: ModeRelations) -> Engine:
    eng = _ENGINES.get(rel.mode)
    if eng is None or eng.rel is not rel:
        eng = Engine(rel)
        _ENGINES[rel.mode] = eng
    return eng


def _resolve(rel) -> ModeRelations:
    return rel if isinstance(rel, ModeRelations) else relations_for(rel)


def normal_form(expr: NCPolynomial, rel, budget: int = DEFAULT_BUDGET) -> NCPolynomial:
    """Canonical sorted-word form of ``expr`` under the mode's commutators."""
    eng = engine_for(_resolve(rel))
    eng.steps = 0
    eng.budget = budget
    return to_polynomial(eng.normalize(expr))


def multiply_normal(a: NCPolynomial, b: NCPolynomial, rel) -> NCPolynomial:
    eng = engine_for(_resolve(rel))
    eng.steps = 0
    return to_polynomial(eng.multiply(eng.normalize(a), eng.normalize(b)))


def commutator(a: NCPolynomial, b: NCPolynomial, rel, budget: int = DEFAULT_BUDGET) -> NCPolynomial:
    """``normal_form(ab - ba)``."""
    eng = engine_for(_resolve(rel))
    eng.steps = 0
    eng.budget = budget
    na, nb = eng.normalize(a), eng.normalize(b)
    ab = eng.multiply(na, nb)
    for key, c in eng.multiply(nb, na).items():
        _add_into(ab, key, -c)
    return to_polynomial(ab)


def adjoint(expr: NCPolynomial) -> NCPolynomial:
    """Reverse every word and conjugate every coefficient.

    All generators (including ``W``) are self-adjoint and ``m``, ``t`` are real.
    """
    return expr.map_terms(lambda w, m, t, c: (tuple(reversed(w)), m, t, c.conjugate()))


def apply_discrete_symmetry(expr: NCPolynomial, which: str) -> NCPolynomial:
    """Parity (linear) or time reversal (antilinear, ``t -> -t``)."""
    which = which.lower().replace("-", "_")
    if which in ("parity", "p"):
        signs, anti = relations_for(Mode.MASSIVE).symmetry_actions["parity"], False
    elif which in ("time_reversal", "timereversal", "t"):
        signs, anti = relations_for(Mode.MASSIVE).symmetry_actions["time_reversal"], True
    else:
        raise ValueError(f"unknown discrete symmetry {which!r}")

    def act(w, m, t, c):
        sign = 1
        for g, p in w:
            if signs[Generator(g)] < 0 and p % 2:
                sign = -sign
        if anti:
            c = c.conjugate()
            if t % 2:
                sign = -sign
        return w, m, t, c * sign

    return expr.map_terms(act)


def jacobi_sum(x: NCPolynomial, y: NCPolynomial, z: NCPolynomial, rel) -> NCPolynomial:
    rel = _resolve(rel)
    return (commutator(commutator(x, y, rel), z, rel)
            + commutator(commutator(y, z, rel), x, rel)
            + commutator(commutator(z, x, rel), y, rel))


def combine(parts: Iterable[Tuple[NCPolynomial, GaussianRational]]) -> NCPolynomial:
    out = NCPolynomial.zero()
    for p, c in parts:
        out = out + p * c
    return out


def group_by_tail(poly: NCPolynomial):
    """Map ``(tail, t_power)`` to the list of ``(comm, m_power, coeff)``."""
    groups = defaultdict(list)
    for (w, m, t), c in poly.items():
        comm, tail = split_word(w)
        groups[(tail, t)].append((comm, m, c))
    return groups
