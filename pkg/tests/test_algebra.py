from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from posop.algebra.ideal import Membership, ideal_reduce
from posop.algebra.polynomial import (
    H, H_INV, IMAG, J, K, P, Q, S, T, W, Generator, NCPolynomial, parse_polynomial,
)
from posop.algebra.relations import Mode, massive_relations, massless_relations, vector_shell_relations
from posop.algebra.rewrite import (
    adjoint, apply_discrete_symmetry, commutator, jacobi_sum, normal_form,
)
from posop.algebra.scalars import GaussianRational, I
from posop.errors import BudgetExceeded, CutoffTooSmall, ParseError, UnknownGenerator

ML = massless_relations()
MV = massive_relations()


def nf(x, rel=ML):
    return normal_form(x, rel)


# --------------------------------------------------------------------------
# scalars and text form
# --------------------------------------------------------------------------

def test_gaussian_rational_arithmetic():
    a = GaussianRational(Fraction(1, 2), 3)
    b = GaussianRational(-2, Fraction(1, 3))
    assert a * b == GaussianRational(Fraction(-1, 2) * 2 - 1, Fraction(1, 6) - 6)
    assert (a / b) * b == a
    assert I * I == -1
    assert a.conjugate().im == -3
    with pytest.raises(ZeroDivisionError):
        GaussianRational(0).inverse()


def test_float_coefficients_rejected():
    with pytest.raises(TypeError):
        GaussianRational.coerce(0.5)


def test_text_form_matches_canonical_grammar():
    x = NCPolynomial.word([(Generator.H, -3), (Generator.P1, 1), (Generator.K1, 1)],
                          GaussianRational(Fraction(3, 2), 1), m=-1)
    assert x.to_text() == "(3/2 + 1i) m^-1 t^0 : H^-3 P1 K1"
    assert NCPolynomial.parse(x.to_text()) == x
    assert NCPolynomial.zero().to_text() == "0"


def test_parse_rejects_garbage():
    with pytest.raises(ParseError):
        parse_polynomial("(1 + 0i) m^0 t^0 : X9")


# --------------------------------------------------------------------------
# normal form examples
# --------------------------------------------------------------------------

def test_boost_momentum_reorders_with_energy():
    assert nf(K[0] * P[0]) == P[0] * K[0] + IMAG * H


def test_commuting_momenta_reorder():
    assert nf(P[1] * P[0]) == P[0] * P[1]


def test_boost_past_inverse_energy():
    h2 = NCPolynomial.gen(Generator.H, -2)
    assert nf(K[0] * H_INV) == H_INV * K[0] - IMAG * h2 * P[0]


def test_rotation_bracket():
    assert commutator(J[0], J[1], ML) == IMAG * J[2]


def test_momentum_energy_commute():
    assert commutator(P[0], H, ML).is_zero()


def test_massive_position_inverse_energy_rule():
    # [Q_i, H^k] = i k P_i H^(k-2)
    for k in (-3, -1, 2, 3):
        lhs = commutator(Q[0], NCPolynomial.gen(Generator.H, k), MV)
        rhs = GaussianRational(0, k) * NCPolynomial.gen(Generator.H, k - 2) * P[0]
        assert lhs == nf(rhs, MV)


def test_massive_w_rule():
    lhs = commutator(Q[1], W, MV)
    assert lhs == nf(-IMAG * W * W * H_INV * P[1], MV)


def test_budget_exceeded():
    x = (K[0] + J[1] + P[2]) ** 4
    with pytest.raises(BudgetExceeded):
        normal_form(x, ML, budget=10)


def test_unknown_generator():
    with pytest.raises(UnknownGenerator):
        normal_form(Q[0] * P[0], ML)
    with pytest.raises(UnknownGenerator):
        normal_form(K[0], MV)


# --------------------------------------------------------------------------
# adjoint and discrete symmetries
# --------------------------------------------------------------------------

def test_adjoint_examples():
    assert adjoint(K[0]) == K[0]
    assert nf(adjoint(IMAG * H_INV * P[0])) == -IMAG * H_INV * P[0]
    assert nf(adjoint(K[0] * P[0])) == nf(K[0] * P[0] - IMAG * H)


def test_discrete_symmetry_examples():
    assert apply_discrete_symmetry(P[0], "parity") == -P[0]
    assert apply_discrete_symmetry(IMAG * K[0], "time_reversal") == -IMAG * K[0]
    assert apply_discrete_symmetry(T * P[0], "time_reversal") == T * P[0]


def test_time_reversal_keeps_foldy_boost():
    from posop.poincare import build_named
    for k in build_named("FoldyK").components:
        assert nf(apply_discrete_symmetry(k, "time_reversal") - k, MV).is_zero()


# --------------------------------------------------------------------------
# ideal reduction
# --------------------------------------------------------------------------

def test_ideal_factorization_member():
    x = nf(H ** 3 - H * (P[0] * P[0] + P[1] * P[1] + P[2] * P[2]))
    res, status = ideal_reduce(x, ML, 4)
    assert status is Membership.MEMBER and res.is_zero()


def test_shell_is_member():
    x = nf(H * H - (P[0] * P[0] + P[1] * P[1] + P[2] * P[2]))
    assert ideal_reduce(x, ML, 4).status is Membership.MEMBER


def test_rotation_generator_not_member():
    res, status = ideal_reduce(J[0], ML, 4)
    assert status is Membership.NOT_MEMBER
    assert res == J[0]


def test_vector_relations_are_members():
    for r in vector_shell_relations():
        assert ideal_reduce(nf(r), ML, 6).status is Membership.MEMBER


def test_multiple_of_vector_relation_is_member():
    r = vector_shell_relations()[0]
    x = nf(P[1] * r * K[2])
    res = ideal_reduce(x, ML, 8)
    assert res.status is Membership.MEMBER


def test_cutoff_below_degree():
    with pytest.raises(CutoffTooSmall):
        ideal_reduce(nf(K[0] * K[1] * P[2]), ML, 2)


def test_massive_shell_decision():
    x = nf(H * H - P[0] * P[0] - P[1] * P[1] - P[2] * P[2], MV) - NCPolynomial.scalar(1, m=2)
    assert ideal_reduce(x, MV, 2).status is Membership.MEMBER
    assert ideal_reduce(nf(W * (H + NCPolynomial.scalar(1, m=1)), MV) - 1, MV, 2).status is Membership.MEMBER
    assert ideal_reduce(nf(S[0], MV), MV, 2).status is Membership.NOT_MEMBER


def test_ideal_reduce_deterministic():
    x = nf(J[0] * K[1] + H_INV * P[0] * J[2])
    a = ideal_reduce(x, ML, 6)
    b = ideal_reduce(x, ML, 6)
    assert a.residual == b.residual and a.status is b.status


# --------------------------------------------------------------------------
# properties on random expressions
# --------------------------------------------------------------------------

def _letters(mode):
    if mode is Mode.MASSLESS:
        return [Generator.P1, Generator.P2, Generator.P3, Generator.J1, Generator.J2, Generator.J3,
                Generator.K1, Generator.K2, Generator.K3]
    return [Generator.W, Generator.P1, Generator.P2, Generator.P3, Generator.S1, Generator.S2,
            Generator.S3, Generator.Q1, Generator.Q2, Generator.Q3]


coeffs = st.builds(GaussianRational, st.integers(-3, 3), st.integers(-3, 3))


def words(mode, max_len=3):
    letter = st.one_of(
        st.sampled_from(_letters(mode)).map(lambda g: (g, 1)),
        st.integers(-2, 2).filter(bool).map(lambda p: (Generator.H, p)),
    )
    return st.lists(letter, max_size=max_len)


def polys(mode, max_terms=3, max_len=3):
    term = st.builds(lambda c, w, t: NCPolynomial.word(w, c, t=t), coeffs, words(mode, max_len),
                     st.integers(0, 1))
    return st.lists(term, min_size=1, max_size=max_terms).map(lambda ts: sum(ts, NCPolynomial.zero()))


modes = st.sampled_from([Mode.MASSLESS, Mode.MASSIVE])
PROP = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def _rel(mode):
    return ML if mode is Mode.MASSLESS else MV


@PROP
@given(st.data())
def test_normal_form_idempotent(data):
    mode = data.draw(modes)
    x = data.draw(polys(mode, max_len=6))
    once = normal_form(x, _rel(mode))
    assert normal_form(once, _rel(mode)) == once


@PROP
@given(st.data())
def test_commutator_antisymmetric_and_bilinear(data):
    mode = data.draw(modes)
    rel = _rel(mode)
    a, b, c = (data.draw(polys(mode)) for _ in range(3))
    k = data.draw(coeffs)
    assert commutator(a, b, rel) == -commutator(b, a, rel)
    assert commutator(k * a + c, b, rel) == normal_form(k * commutator(a, b, rel) + commutator(c, b, rel), rel)


@PROP
@given(st.data())
def test_adjoint_antiautomorphism(data):
    mode = data.draw(modes)
    rel = _rel(mode)
    a, b = data.draw(polys(mode)), data.draw(polys(mode))
    assert normal_form(adjoint(a * b), rel) == normal_form(adjoint(b) * adjoint(a), rel)
    assert normal_form(adjoint(adjoint(a)), rel) == normal_form(a, rel)
    # adjoint commutes with normalization
    assert normal_form(adjoint(normal_form(a, rel)), rel) == normal_form(adjoint(a), rel)


@PROP
@given(st.data())
def test_discrete_symmetries_involutive_and_multiplicative(data):
    mode = data.draw(modes)
    rel = _rel(mode)
    a, b = data.draw(polys(mode)), data.draw(polys(mode))
    for which in ("parity", "time_reversal"):
        assert apply_discrete_symmetry(apply_discrete_symmetry(a, which), which) == a
        lhs = apply_discrete_symmetry(a * b, which)
        rhs = apply_discrete_symmetry(a, which) * apply_discrete_symmetry(b, which)
        assert normal_form(lhs, rel) == normal_form(rhs, rel)
        assert normal_form(apply_discrete_symmetry(normal_form(a, rel), which), rel) == \
            normal_form(apply_discrete_symmetry(a, which), rel)
    # time reversal is antilinear
    assert apply_discrete_symmetry(IMAG * a, "time_reversal") == -IMAG * apply_discrete_symmetry(a, "time_reversal")


@PROP
@given(st.data())
def test_text_round_trip(data):
    mode = data.draw(modes)
    x = data.draw(polys(mode, max_len=5))
    x = x * NCPolynomial.scalar(1, m=data.draw(st.integers(-2, 2)))
    assert NCPolynomial.parse(x.to_text()) == x


@PROP
@given(st.data())
def test_jacobi_on_random_polynomials(data):
    mode = data.draw(modes)
    rel = _rel(mode)
    a, b, c = (data.draw(polys(mode, max_terms=2, max_len=2)) for _ in range(3))
    assert normal_form(jacobi_sum(a, b, c, rel), rel).is_zero()


def test_commutator_table_antisymmetric():
    for rel in (ML, MV):
        for (x, y), v in rel.commutator_table.items():
            assert rel.commutator_table[(y, x)] == -v


def test_boost_triple_cancels():
    assert normal_form(jacobi_sum(K[0], K[1], P[0], ML), ML).is_zero()
