"""Exact evaluation in the zero-helicity momentum representation.

On functions of momentum ``k`` the massless generators act as

    P_i = k_i,  H = |k|,  J = -i k x grad,  K_i = i (|k| d_i + k_i / (2|k|)).

Both shell relations vanish identically here (``k . (k x grad) = 0``), so an
element whose image is nonzero on some test function is certified to lie
outside the massless ideal.  Test functions are ``exp(phi) * 1`` with a
fixed polynomial ``phi`` and evaluation points with rational ``|k|``, which
keeps every number exact.
"""
from __future__ import annotations

import sympy as sp

from .polynomial import Generator, NCPolynomial

k1, k2, k3, t_sym = sp.symbols("k1 k2 k3 t", real=True)
KS = (k1, k2, k3)
R = sp.sqrt(k1 ** 2 + k2 ** 2 + k3 ** 2)
PHI = -(k1 ** 2 + k2 ** 2 + k3 ** 2) / 3 + k1 / 5 + k2 / 7 - k3 / 11
GRAD_PHI = tuple(sp.diff(PHI, k) for k in KS)
# points with rational |k|: (1,2,2) -> 3, (2,3,6) -> 7
POINTS = ((1, 2, 2), (2, 3, 6))


def _d(h, i):
    """Derivative of ``exp(PHI) h`` divided by ``exp(PHI)``."""
    return sp.diff(h, KS[i]) + GRAD_PHI[i] * h


def _apply_letter(g: Generator, h):
    fam, i = g.family, g.index - 1
    if fam == "P":
        return KS[i] * h
    if fam == "H":
        return R * h
    if fam == "J":
        a, b = (i + 1) % 3, (i + 2) % 3
        return -sp.I * (KS[a] * _d(h, b) - KS[b] * _d(h, a))
    if fam == "K":
        return sp.I * (R * _d(h, i) + KS[i] * h / (2 * R))
    raise ValueError(f"{g.name} has no action in the zero-helicity representation")


def apply_word(word, h=sp.Integer(1)):
    for g, p in reversed(word):
        gen = Generator(g)
        if gen is Generator.H:
            h = R ** p * h
            continue
        for _ in range(p):
            h = _apply_letter(gen, h)
    return h


def image_values(expr: NCPolynomial):
    """Exact images at the evaluation points (polynomials in ``t``)."""
    total = sp.Integer(0)
    for (w, m, t), c in expr.items():
        if m:
            raise ValueError("the massless representation has no mass symbol")
        coeff = sp.Rational(c.re.numerator, c.re.denominator) + sp.I * sp.Rational(c.im.numerator, c.im.denominator)
        total += coeff * t_sym ** t * apply_word(w)
    values = []
    for pt in POINTS:
        v = total.subs(dict(zip(KS, pt)))
        values.append(sp.expand(v))
    return values


def acts_nontrivially(expr: NCPolynomial) -> bool:
    """True if ``expr`` is certified nonzero in the representation."""
    return any(v != 0 for v in image_values(expr))
