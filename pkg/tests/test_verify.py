import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from totlab import analytic, arith, counting, verify
from totlab.counting import Regime
from totlab.errors import ArgumentError, CapacityError, GeometryError, TotlabError

R1 = 1.9435964368207592


@pytest.mark.parametrize("y, target", [(2, 1.0), (0.5, 0.0)])
def test_kernel_examples(y, target):
    kc = verify.perron_kernel_check(y, 1, 1000)
    assert kc.target == target
    assert abs(kc.estimate - target) <= kc.bound


def test_kernel_at_one():
    errs = [abs(verify.perron_kernel_check(1, 1, T).estimate - 0.5) for T in (10, 100, 1000)]
    assert errs[0] > errs[1] > errs[2]
    assert verify.perron_kernel_check(1, 1, 1000).bound is None


@given(
    st.floats(0.1, 10).filter(lambda y: abs(y - 1) > 1e-6),
    st.floats(0.1, 3),
    st.floats(1, 300),
)
@settings(max_examples=40, deadline=None)
def test_kernel_within_bound(y, a, T):
    kc = verify.perron_kernel_check(y, a, T)
    assert abs(kc.estimate - kc.target) <= kc.bound


def test_kernel_errors():
    with pytest.raises(ArgumentError):
        verify.perron_kernel_check(2, 0, 10)
    with pytest.raises(ArgumentError):
        verify.perron_kernel_check(2, 1, 0.5)


def test_exact_a_small_example():
    # stated example: within 0.5 of the exact count 8
    est = verify.perron_count_estimate(1, 0, 10, 4, 0.5, 500)
    assert abs(est - 8) <= 0.5


def test_exact_a_small_tie_weighted():
    # the kernel gives weight 1/2 to the three n with phi(n) = 4 exactly
    d = verify.perron_count_detail(1, 0, 10, 4, 0.5, 500)
    assert abs(d.estimate - 6.5) <= d.error_bound
    assert abs(d.estimate - d.coarse) < 1e-6


def test_exact_a_medium():
    exact = counting.count_phi_ratio(1, 0, 10**4, 5000).count
    d = verify.perron_count_detail(1, 0, 10**4, 5000, 0.5, 1000)
    assert abs(d.estimate - exact) / exact <= 0.05
    assert abs(d.estimate - exact) <= d.error_bound


def test_exact_a_doubling_tau():
    k, beta, x, y, b = 1, 0, 3000, "1234.5", 0.5
    exact = counting.count_phi_ratio(k, beta, x, y).count
    prev = None
    for tau in (50, 100, 200, 400, 800):
        d = verify.perron_count_detail(k, beta, x, y, b, tau)
        err = abs(d.estimate - exact)
        if prev is not None:
            assert err <= prev + d.error_bound
        prev = err


def test_exact_a_against_direct_quadrature():
    # brute-force the same integral with mpmath on a tiny instance
    L = counting.log_f_values(2, 1, 12)
    y, b, tau = 3.0, 0.7, 20.0

    def f(eta):
        z = mpmath.mpc(b, eta)
        return mpmath.re(sum(mpmath.exp(z * (math.log(y) - float(l))) for l in L) / z)

    ref = float(mpmath.quad(f, mpmath.linspace(0, tau, 41))) / math.pi
    est = verify.perron_count_estimate(2, 1, 12, 3, b, tau, steps=400)
    assert est == pytest.approx(ref, abs=1e-6)


def test_residue_r_example():
    exact = counting.count_phi_ratio(1, 0, 10**4, 5000).count
    d = verify.perron_count_detail(1, 0, 10**4, 5000, 0.5, 100, mode="RESIDUE_R")
    assert d.residue_term == pytest.approx(R1 * 5000, rel=1e-9)
    assert abs(d.estimate - exact) / exact <= 0.05
    assert abs(d.estimate - d.coarse) / exact < 1e-6


def test_residue_r_right_of_pole():
    # b > z0: no residue crossing is needed, the line sits at d = b
    d = verify.perron_count_detail(2, "3/2", 10**4, 40, 2.5, 100, mode="RESIDUE_R")
    assert d.horizontal == 0.0


def test_residue_r_geometry_and_caps():
    with pytest.raises(GeometryError):
        verify.perron_count_detail(1, 0, 10**4, 5000, 1.0005, 50, mode="RESIDUE_R")
    with pytest.raises(GeometryError):
        verify.perron_count_detail(1, 0, 10**4, 5000, 0.5, 50, mode="RESIDUE_R", shift=1.0002)
    with pytest.raises(ArgumentError):
        verify.perron_count_detail(1, 0, 10**4, 5000, 0.5, 201, mode="RESIDUE_R")
    with pytest.raises(ArgumentError):
        verify.perron_count_detail(2, 3, 100, 5, 0.5, 50, mode="RESIDUE_R")
    with pytest.raises(ArgumentError):
        verify.perron_count_detail(1, 0, 100, 5, 0.5, 50, mode="OTHER")


def test_default_shift_exceeds_pole_for_negative_delta():
    d = verify.default_shift(2, -1.0, 1e4, 1e6)
    assert d > 1 / (1 - -1.0)


def test_distribution_small_example():
    (row,) = verify.verify_distribution(1, 0, 10, [0.4])
    assert row.exact_count == 8
    assert row.main_term == pytest.approx(R1 * 4, rel=1e-12)
    assert row.rel_err == pytest.approx(abs(8 - R1 * 4) / (R1 * 4), rel=1e-12)
    assert row.regime.tag is Regime.THM6_MAIN


@pytest.mark.parametrize("k, beta, r", [(1, 0, R1), (2, 1, 1.7984365477014062)])
def test_distribution_half_example(k, beta, r):
    (row,) = verify.verify_distribution(k, beta, 10**6, [0.5])
    assert row.main_term == pytest.approx(r * 5e5, rel=1e-9)
    assert 0.98 <= row.exact_count / row.main_term <= 1.02


def test_distribution_rel_err_decreases():
    errs = [verify.verify_distribution(1, 0, x, [0.5], sample_stride=0)[0].rel_err for x in (10**4, 10**5, 10**6)]
    assert errs[0] > errs[1] > errs[2]


def test_distribution_main_term_only_for_main_regimes():
    # threshold at x = 10^4 is about 1.354
    rows = verify.verify_distribution(2, "3/2", 10**4, [], ys=["1.3", 5000, 20000])
    tags = [r.regime.tag for r in rows]
    assert tags == [Regime.THM3_MAIN, Regime.THM4_BOUND, Regime.TRIVIAL_FULL]
    assert rows[0].main_term is not None and rows[0].rel_err is not None
    assert rows[1].main_term is None and rows[2].main_term is None
    assert rows[2].exact_count == 10**4


def test_distribution_cross_check_samples():
    rows = verify.verify_distribution(4, 3, 20000, [0.3], sample_stride=100)
    assert rows[0].sample_checks == 200


def test_minimal_constants():
    assert verify.minimal_constant(1) == pytest.approx(0.561459484, abs=1e-9)
    assert verify.minimal_constant(2) == pytest.approx(0.714866, abs=1e-5)
    assert verify.minimal_constant(4) == pytest.approx(0.455101, abs=1e-6)
    eg = mpmath.exp(-mpmath.euler)
    assert verify.minimal_constant(2) == pytest.approx(float(4 / mpmath.pi * eg), rel=1e-14)
    assert verify.minimal_constant(6) == pytest.approx(float(eg / mpmath.dirichlet(3, [0, 1, 0, -1])), rel=1e-13)
    assert verify.minimal_constant(8) == pytest.approx(float(eg * 16 / 15 / mpmath.zeta(4)), rel=1e-13)
    g = arith.DEFAULT_CONSTANTS.gamma_f
    assert abs(verify.minimal_constant(2) * math.pi / 4 * math.exp(g) - 1) <= 1e-9
    with pytest.raises(ArgumentError):
        verify.minimal_constant(0)


def test_extremal_s6():
    rows = [r for r in verify.verify_extremal(1, 6) if r.kind == "min"]
    last = rows[-1]
    assert last.s == 6 and last.n_s == 30030
    # prod_{p <= 13} (1 - 1/p) = 192/1001
    ref = (192 / 1001) * math.log(math.log(30030)) / math.exp(-0.5772156649015329)
    assert last.ratio == pytest.approx(ref, rel=1e-13)
    assert last.ratio == pytest.approx(0.797, abs=5e-4)


def test_extremal_log_domain_matches_exact():
    from totlab import totient

    for k in (1, 2, 4):
        for r in verify.verify_extremal(k, 12):
            if r.kind != "min":
                continue
            n = r.n_s
            exact = totient.phi_k(n, k) / n**k * math.log(math.log(n)) / verify.minimal_constant(k)
            assert r.ratio == pytest.approx(exact, rel=1e-12)


def test_extremal_max_rows():
    rows = [r for r in verify.verify_extremal(2, 78498) if r.kind == "max"]
    assert len(rows) == 10 and rows[-1].n_s == 999983
    for r in rows:
        assert r.ratio >= 1 - 4 / r.n_s


def test_extremal_errors():
    with pytest.raises(ArgumentError):
        verify.verify_extremal(1, 1)
    with pytest.raises(CapacityError):
        verify.verify_extremal(1, 700000)


def test_mertens_rows():
    rows = verify.verify_mertens([10, 10**4, 10**6])
    get = {(r.x, r.quantity): r for r in rows}
    assert get[(10, "sum_1/p")].value == pytest.approx(1.176190476, abs=1e-9)
    assert abs(get[(10**6, "prod_1-1/p*lnx*e^gamma")].deviation) <= 0.02
    assert abs(get[(10**4, "prod_1-p^-2")].deviation) <= 2e-4
    with pytest.raises(ArgumentError):
        verify.verify_mertens([5])
