import numpy as np
import pytest
from scipy import integrate

from posop.errors import GridTooSmall, MomentDivergence
from posop.momentum import (
    GaussianSpec, GridSpec, OperatorId, Wavepacket, anisotropy_split, apply_operator,
    commutator_residual_study, eigenfunction_residual, expectation_tensor, hermiticity_defect,
    make_gaussian, position_space_transform, radial_eigenfunction_check, radial_solution,
    realization_residual_study, refinement_grids, uncertainty_report,
)
from posop.momentum.operators import apply_h_power


@pytest.fixture(scope="module")
def grid():
    return GridSpec(4.0, 61)


@pytest.fixture(scope="module")
def iso(grid):
    return make_gaussian(1.0, (0, 0, 0), grid)


def aligned_moment(alpha, kappa, fn):
    """Integral of ``|S|^2 fn(k, cos)`` for ``S ~ exp(-alpha |k - kappa z|^2)``, normalized."""
    beta = 2 * alpha

    def dens(c, k):
        return k * k * np.exp(-beta * (k * k + kappa * kappa - 2 * k * kappa * c))

    norm = integrate.dblquad(dens, 0, 12, -1, 1, epsabs=1e-13, epsrel=1e-12)[0]
    val = integrate.dblquad(lambda c, k: dens(c, k) * fn(k, c), 0, 12, -1, 1, epsabs=1e-13, epsrel=1e-12)[0]
    return val / norm


# --------------------------------------------------------------------------
# grids and packets
# --------------------------------------------------------------------------

def test_grid_invariants():
    with pytest.raises(ValueError):
        GridSpec(4.0, 15)
    with pytest.raises(ValueError):
        GridSpec(4.0, 41, eps_min=0.1)
    g = GridSpec(4.0, 41)
    assert g.h == pytest.approx(0.2)
    assert g.eps_min == pytest.approx(0.4)
    assert not g.mask[20, 20, 20]


def test_packet_normalized(grid):
    for alpha, k0 in ((1.0, (0, 0, 0)), (2.0, (0.5, -0.3, 1.0)), (0.7, (1, 1, 1))):
        assert abs(make_gaussian(alpha, k0, grid).norm - 1) <= 1e-10


def test_packet_is_immutable(iso):
    with pytest.raises(ValueError):
        iso.samples[0, 0, 0] = 1


def test_centered_packet_has_zero_mean_momentum(iso, grid):
    for i in range(3):
        assert abs(grid.inner(iso.samples, apply_operator(OperatorId("P", i + 1), iso, grid))) <= 1e-8


def test_mean_momentum_matches_spherical_quadrature():
    g = GridSpec(7.0, 71)
    psi = make_gaussian(1.0, (0, 0, 3), g)
    p3 = g.inner(psi.samples, apply_operator("P3", psi, g)).real
    assert p3 == pytest.approx(aligned_moment(1.0, 3.0, lambda k, c: k * c), abs=1e-7)


def test_leaky_packets_rejected():
    with pytest.raises(GridTooSmall):
        make_gaussian(1.0, (0, 0, 3.5), GridSpec(4.0, 41))
    with pytest.raises(GridTooSmall):
        make_gaussian(1.0, (0, 0, 0), GridSpec(4.0, 21))


# --------------------------------------------------------------------------
# operators
# --------------------------------------------------------------------------

def test_operator_id_parse():
    assert OperatorId.parse("Q2") == OperatorId("Q", 2)
    assert OperatorId.parse("K(3)") == OperatorId("K", 3)
    assert str(OperatorId.parse("H")) == "H"
    with pytest.raises(ValueError):
        OperatorId("P", 4)


def test_energy_multiplies(iso, grid):
    out = apply_operator("H", iso, grid)
    assert np.allclose(out[grid.mask], (grid.r * iso.samples)[grid.mask])
    assert np.all(out[~grid.mask] == 0)


def _shell(g, lo=1.0, hi=2.0):
    return g.mask & (g.r >= lo) & (g.r <= hi)


def test_position_on_radial_function():
    errs = []
    for n in (41, 81):
        g = GridSpec(4.0, n)
        f = np.exp(-g.r ** 2).astype(complex)
        out = apply_operator("Q1", f, g)
        r = g.r_safe
        exact = 1j * g.k[0] / r * (1 / r - 2 * r) * np.exp(-r ** 2)
        errs.append(np.max(np.abs(out - exact)[_shell(g)]))
    assert errs[1] < 1e-2
    assert errs[0] / errs[1] == pytest.approx(4, rel=0.25)


def test_boost_formula(grid):
    spec = GaussianSpec(1.0, (0.3, 0.2, 0.4))
    f = spec.evaluate(grid)
    k1, k2, k3 = grid.k
    r = grid.r_safe
    d1 = -2 * (k1 - 0.3) * f
    exact = 1j * (r * d1 + 0.5 * k1 / r * f)
    out = apply_operator("K1", f, grid)
    assert np.max(np.abs(out - exact)[_shell(grid)]) < 0.05


def test_boost_past_inverse_energy_numerically(grid):
    f = GaussianSpec(1.0, (0.3, -0.2, 0.5)).evaluate(grid)
    lhs = apply_operator("K1", apply_h_power(-1, f, grid), grid)
    rhs = (apply_h_power(-1, apply_operator("K1", f, grid), grid)
           - 1j * grid.k[0] * apply_h_power(-2, f, grid))
    sel = _shell(grid)
    assert np.max(np.abs(lhs - rhs)[sel]) < 0.05 * np.max(np.abs(rhs)[sel])


def test_boost_triple_jacobi_numerically(grid):
    f = GaussianSpec(1.0, (0.2, 0.1, 0.6)).evaluate(grid)

    def op(name):
        return lambda x: apply_operator(name, x, grid)

    def comm(a, b):
        return lambda x: a(b(x)) - b(a(x))

    k1, k2, p1 = op("K1"), op("K2"), op("P1")
    total = comm(comm(k1, k2), p1)(f) + comm(comm(k2, p1), k1)(f) + comm(comm(p1, k1), k2)(f)
    sel = _shell(grid, 1.2, 1.8)
    assert np.max(np.abs(total)[sel]) < 0.05


def test_position_hermitian_to_second_order():
    defects = []
    for n in (41, 81):
        # packets kept off the exclusion sphere so no surface term survives
        g = GridSpec(5.0, n, 0.8)
        phi = GaussianSpec(2.0, (0.0, 1.8, 1.8)).evaluate(g)
        psi = GaussianSpec(2.0, (1.9, 0.4, 1.6)).evaluate(g)
        defects.append(hermiticity_defect("Q2", phi, psi, g))
    assert defects[1] < 1e-4
    assert defects[0] / defects[1] == pytest.approx(4, rel=0.2)


# --------------------------------------------------------------------------
# expectation tensor and uncertainty
# --------------------------------------------------------------------------

def test_isotropic_tensor(iso):
    t = expectation_tensor(iso)
    assert np.allclose(np.diag(t), 1 / 3, atol=1e-6, rtol=0)
    assert np.max(np.abs(t - np.diag(np.diag(t)))) <= 1e-8
    assert np.array_equal(t, t.T)


def test_far_packet_tensor_matches_aligned_quadrature():
    g = GridSpec(9.0, 91)
    psi = make_gaussian(1.0, (0, 0, 6), g)
    t = expectation_tensor(psi)
    zz = aligned_moment(1.0, 6.0, lambda k, c: c * c)
    assert t[2, 2] == pytest.approx(zz, abs=1e-7)
    assert t[2, 2] > 0.98
    assert t[0, 0] == pytest.approx((1 - zz) / 2, abs=1e-7)


def test_trace_is_one_for_every_packet(grid):
    for k0 in ((0, 0, 0), (0.4, 0, 0), (0.3, -0.6, 1.1)):
        assert np.trace(expectation_tensor(make_gaussian(1.0, k0, grid))) == pytest.approx(1, abs=1e-12)


def test_isotropic_uncertainty_report(iso):
    rep = uncertainty_report(iso)
    assert np.allclose(rep.bound_tensor, np.eye(3) / 6, atol=1e-6)
    assert np.all(rep.products - 1 / 6 >= -1e-6)
    assert rep.trace_check == pytest.approx(0.5, abs=1e-6)
    assert rep.B == 0.0 and rep.A == pytest.approx(1 / 6, abs=1e-6)
    assert rep.robertson_margin > 0
    # analytic: dP = 1/(2 sqrt(alpha)), dQ = sqrt(alpha); the exclusion ball
    # removes low-|k| mass and pushes dP up slightly
    assert np.all((rep.dp > 0.5) & (rep.dp < 0.52))
    assert np.all((rep.dq > 0.9) & (rep.dq < 1.05))


def test_anisotropy_split_recovers_coefficients():
    n = np.array([1.0, 2.0, 2.0]) / 3
    kappa = 0.7
    k0 = kappa * n
    t = 0.2 * np.eye(3) + 0.3 * np.outer(k0, k0)
    A, B = anisotropy_split(t, k0)
    assert A == pytest.approx(0.2) and B == pytest.approx(0.3)


def test_moment_divergence_detected():
    g = GridSpec(4.0, 41)
    vals = np.where(g.mask, np.exp(-g.r ** 2) / g.r_safe ** 1.4, 0).astype(complex)
    vals /= g.norm(vals)
    with pytest.raises(MomentDivergence):
        uncertainty_report(Wavepacket(vals, g))


# --------------------------------------------------------------------------
# refinement studies
# --------------------------------------------------------------------------

SHORT = (21, 41, 81)


def test_self_commutator_is_exactly_zero():
    rep = commutator_residual_study(2, 2, GaussianSpec(1.0, (0, 0, 0)), refinement_grids(SHORT))
    assert rep.residual == [0.0, 0.0, 0.0]


def test_position_commutator_second_order():
    rep = commutator_residual_study(1, 3, GaussianSpec(1.0, (0, 0, 0)), refinement_grids(SHORT))
    assert rep.order == pytest.approx(2.0, abs=0.3)
    assert rep.parameter == sorted(rep.parameter, reverse=True)


def test_direct_and_composed_position_agree():
    rep = realization_residual_study(2, GaussianSpec(1.0, (0.1, 0.2, 0.0)), refinement_grids(SHORT))
    assert rep.order == pytest.approx(2.0, abs=0.3)


def test_residual_report_rejects_bad_ladders():
    from posop.momentum import ResidualReport
    with pytest.raises(ValueError):
        ResidualReport("x", [0.1, 0.2], [1.0, 0.5], 1.0)
    with pytest.raises(ValueError):
        ResidualReport("x", [0.2, 0.1], [1.0, -0.5], 1.0)


# --------------------------------------------------------------------------
# eigenfunctions
# --------------------------------------------------------------------------

def test_radial_zero_eigenvalue_is_pure_decay():
    rep = radial_eigenfunction_check(0.0, steps=(500, 1000))
    assert max(rep.residual) <= 1e-8


def test_radial_fourth_order():
    rep = radial_eigenfunction_check(2.0, steps=(250, 500, 1000))
    assert all(abs(r - 16) <= 4 for r in rep.ratios)
    assert rep.order == pytest.approx(4, abs=0.2)


def test_eigenfunction_residual_first_order():
    rep = eigenfunction_residual((0.0, 0.0, 2.0), (0.2, 0.1, 0.05, 0.02))
    assert rep.order == pytest.approx(1.0, abs=0.2)
    assert max(rep.meta["on_axis_relative_error"]) < 1e-4


def test_eigenfunction_radial_factor():
    p = np.linspace(0.1, 10, 7)
    assert np.allclose(radial_solution(2.0, p) * p, np.exp(-2j * p))


def test_radial_fourier_integral_closed_form():
    eta, b = 0.5, 0.7
    re = integrate.quad(lambda p: np.exp(-eta * p) * np.cos(b * p), 0, np.inf)[0]
    im = integrate.quad(lambda p: np.exp(-eta * p) * np.sin(b * p), 0, np.inf)[0]
    assert complex(re, im) == pytest.approx(1 / (eta - 1j * b), abs=1e-10)


@pytest.fixture(scope="module")
def profile():
    return position_space_transform((0.0, 0.0, 2.0), 0.05, np.arange(0, 4.0001, 0.05))


def test_fourier_peak_and_transverse_flatness(profile):
    assert abs(profile.peak_position - 2.0) <= 0.05
    assert profile.transverse_variation <= 0.05


def test_fourier_sharpens_as_width_shrinks():
    xs = np.arange(0, 4.0001, 0.025)
    profs = [position_space_transform((0, 0, 2.0), s, xs) for s in (0.3, 0.15, 0.05)]
    widths = [p.fwhm for p in profs]
    peaks = [p.peak_magnitude for p in profs]
    assert widths == sorted(widths, reverse=True) and widths[0] > widths[-1]
    assert peaks == sorted(peaks)


def test_fourier_sign_convention():
    xs = np.arange(-4, 4.0001, 0.05)
    back = position_space_transform((0.0, 0.0, 2.0), 0.05, xs, sign=-1)
    assert back.peak_position == pytest.approx(-2.0, abs=0.05)


def test_fourier_general_direction():
    q = np.array([1.0, -2.0, 2.0])
    prof = position_space_transform(q, 0.05, np.arange(0, 6.0001, 0.05))
    assert abs(prof.peak_position - 3.0) <= 0.05
