import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tfdpdc import liouville as lv
from tfdpdc import pdc
from tfdpdc.errors import ConfigError, OccupationOutOfRange
from tfdpdc.fock import BasisDescriptor, basis_state, inner_product, normalize, state_index, vacuum
from tfdpdc.operators import expectation, number_operator

from conftest import random_state

LN2 = math.log(2)

# brute-force double sum over n != m (pure Python loops, no vectorization),
# evaluated once at beta*omega0 = ln 2 and pinned here
SIMPLIFIED_LN2_CUTOFF40 = -30.469738855690768


def cfg(a=16, b=1, c=1, **kw):
    return lv.PdcConfig(cutoff_a=a, cutoff_b=b, cutoff_c=c, **kw)


# --- LambdaSeries ------------------------------------------------------------------

@given(st.floats(0.05, 20.0), st.integers(1, 60))
def test_lambda_invariants(bw, cutoff):
    s = pdc.LambdaSeries.build(bw, cutoff)
    lam = s.lambdas
    assert (lam > 0).all()
    assert (np.diff(lam) <= 0).all()
    assert abs((lam ** 2).sum() + s.tail_weight - 1) <= 1e-12
    assert s.mean_number() <= 1 / math.expm1(bw) * (1 + 1e-12)


def test_lambda_strictly_decreasing():
    assert (np.diff(pdc.LambdaSeries.build(LN2, 40).lambdas) < 0).all()


def test_lambda_ln2_values():
    s = pdc.LambdaSeries.build(LN2, 40)
    assert np.allclose(s.lambdas ** 2, 2.0 ** -(np.arange(41) + 1), rtol=1e-14)
    assert s.mean_number() == pytest.approx(1.0, abs=1e-10)


def test_lambda_rejects_nonpositive():
    with pytest.raises(ConfigError):
        pdc.LambdaSeries.build(0.0, 5)


# --- initial state -------------------------------------------------------------------

def test_initial_state_numbers():
    c = cfg(40)
    s = pdc.build_initial_state(LN2, c)
    assert abs(s.norm() - 1) <= 1e-14
    assert expectation(number_operator("a", c.basis()), s).real == pytest.approx(1.0, abs=1e-9)
    for m in ("b", "b~", "c", "c~"):
        assert expectation(number_operator(m, c.basis()), s) == 0


def test_initial_state_zero_temperature():
    c = cfg(4)
    s = pdc.build_initial_state(1e3, c)
    assert np.abs(s.amplitudes - vacuum(c.basis()).amplitudes).max() < 1e-100


# --- closed form -----------------------------------------------------------------------

def test_closed_form_amplitudes():
    c = cfg(16)
    out = pdc.closed_form_output_state(LN2, c)
    lam = pdc.LambdaSeries.build(LN2, 16).lambdas
    n = np.arange(17)
    norm = math.sqrt(2 * (n * lam ** 2).sum())
    for k in range(1, 17):
        coef = lam[k] * math.sqrt(k) / norm
        assert out.amplitude((k - 1, k, 1, 0, 1, 0)) == pytest.approx(-1j * coef, abs=1e-15)
        assert out.amplitude((k, k - 1, 0, 1, 0, 1)) == pytest.approx(1j * coef, abs=1e-15)
    assert np.count_nonzero(out.amplitudes) == 32
    assert abs(out.norm() - 1) <= 1e-14


def test_closed_form_no_vacuum_part():
    c = cfg(8)
    out = pdc.closed_form_output_state(0.7, c)
    assert inner_product(vacuum(c.basis()), out) == 0


def test_closed_form_requires_signal_idler():
    with pytest.raises(ConfigError):
        pdc.closed_form_output_state(1.0, cfg(4, 0, 1))


def test_closed_form_larger_signal_cutoff():
    a = pdc.closed_form_output_state(1.0, cfg(6, 1, 1))
    b = pdc.closed_form_output_state(1.0, cfg(6, 3, 2))
    for k in range(1, 7):
        for occ in ((k - 1, k, 1, 0, 1, 0), (k, k - 1, 0, 1, 0, 1)):
            assert a.amplitude(occ) == b.amplitude(occ)


# --- photon-number report ---------------------------------------------------------------

def test_report_worked_example():
    rep = pdc.photon_number_report(LN2, cfg(40))
    assert rep.method == pdc.CLOSED_FORM
    assert rep.n0_before == pytest.approx(1.0, abs=1e-6)
    assert rep.n0_after == pytest.approx(2.5, abs=1e-6)
    assert rep.n1_before == rep.n2_before == 0
    assert rep.n1_after == pytest.approx(1.0, abs=1e-14)
    assert rep.n2_after == pytest.approx(1.0, abs=1e-14)
    # each branch carries one photon pair split between hat and tilde copies
    assert rep.n1_hat_after == pytest.approx(0.5, abs=1e-14)
    assert rep.n2_hat_after == pytest.approx(0.5, abs=1e-14)


@pytest.mark.parametrize("bw", [0.3, LN2, 2.0])
def test_report_matches_analytic_formula(bw):
    c = cfg(30)
    rep = pdc.photon_number_report(bw, c)
    lam = pdc.LambdaSeries.build(bw, 30).lambdas
    assert rep.n0_after == pytest.approx(pdc.analytic_pump_after(lam), abs=1e-12)


def test_report_profiles_sum_to_one():
    rep = pdc.photon_number_report(0.5, cfg(20))
    assert abs(sum(p for _, p in rep.residual_profile) - 1) <= 1e-10
    assert abs(sum(p for _, p in rep.profile_before) - 1) <= 1e-10
    assert [n for n, _ in rep.residual_profile] == list(range(21))


def test_report_profile_is_shifted_marginal():
    rep = pdc.photon_number_report(LN2, cfg(20))
    lam = pdc.LambdaSeries.build(LN2, 20).lambdas
    n = np.arange(21)
    w = n * lam ** 2 / (2 * (n * lam ** 2).sum())
    want = np.zeros(21)
    want[:-1] += w[1:]   # |n-1> branch
    want += w            # |n> branch
    got = np.array([p for _, p in rep.residual_profile])
    assert np.abs(got - want).max() <= 1e-14


def test_report_exact_evolution():
    c = cfg(16, 3, 3, kappa=0.01)
    rep = pdc.photon_number_report(LN2, c, pdc.EXACT)
    assert rep.method == pdc.EXACT
    assert rep.n1_after == pytest.approx(1.0, abs=1e-3)
    assert rep.n0_after == pytest.approx(2.5, abs=1e-2)


def test_report_unknown_method():
    with pytest.raises(ConfigError):
        pdc.photon_number_report(1.0, cfg(3), "magic")


def test_report_off_resonance_warning_carried():
    with pytest.warns(lv.OffResonanceWarning):
        c = cfg(4, omega0=1.0, omega1=0.4, omega2=0.4)
    assert pdc.photon_number_report(1.0, c).warnings == ("off-resonance",)


def test_report_as_dict_keys():
    d = pdc.photon_number_report(1.0, cfg(4)).as_dict()
    for key in ("method", "n0_before", "n1_before", "n2_before", "n0_after",
                "n1_after", "n2_after", "residual_profile"):
        assert key in d


def test_branch_fidelity_perturbative():
    assert pdc.branch_fidelity(LN2, cfg(12, 2, 2, kappa=0.01)) >= 0.999


# --- residual formulas --------------------------------------------------------------------

def brute_simplified(bw, cutoff):
    lam = [math.exp(-n * bw / 2) * math.sqrt(1 - math.exp(-bw)) for n in range(cutoff + 1)]
    n0 = sum(n * lam[n] ** 2 for n in range(cutoff + 1))
    off = 0.0
    for n in range(cutoff + 1):
        for m in range(cutoff + 1):
            if n != m:
                off += n * m * lam[n] * lam[m]
    return n0 - off / n0 - 0.5


def test_simplified_matches_brute_force():
    for bw, cut in ((LN2, 40), (0.4, 25), (3.0, 10)):
        assert pdc.simplified_pump_after(pdc.LambdaSeries.build(bw, cut).lambdas) == \
            pytest.approx(brute_simplified(bw, cut), rel=1e-12)


def test_residual_audit_ln2():
    audit = pdc.residual_simplified_eval(LN2, 40)
    assert audit.main == pytest.approx(2.5, abs=1e-6)
    assert audit.simplified == pytest.approx(SIMPLIFIED_LN2_CUTOFF40, rel=1e-12)
    assert audit.discrepancy == pytest.approx(audit.simplified - audit.main, abs=0)
    assert abs(audit.discrepancy) > 1.0


def test_residual_formulas_single_term_limit():
    lam = np.array([0.0, 1.0])
    assert pdc.analytic_pump_after(lam) == pytest.approx(0.5, abs=1e-15)
    assert pdc.simplified_pump_after(lam) == pytest.approx(0.5, abs=1e-15)


def test_worked_example_sum():
    assert pdc.worked_example_sum(60) == pytest.approx(2.5, abs=1e-12)
    assert pdc.worked_example_sum(40) == pytest.approx(2.5, abs=1e-6)


# --- projections ------------------------------------------------------------------------------

def test_project_vacuum_outcome_is_zero():
    cond, p = pdc.project_pump(pdc.closed_form_output_state(LN2, cfg(8)), 0, 0)
    assert p == 0 and not cond.amplitudes.any()


def test_project_out_of_range():
    with pytest.raises(OccupationOutOfRange):
        pdc.project_pump(pdc.closed_form_output_state(LN2, cfg(3)), 9, 9)


@given(st.integers(0, 2 ** 32 - 1))
def test_projection_completeness(seed):
    basis = BasisDescriptor.from_pairs(3, 1, 1)
    s = normalize(random_state(basis, np.random.default_rng(seed)))
    total = sum(pdc.project_pump(s, i, j)[1] for i in range(4) for j in range(4))
    assert abs(total - 1) <= 1e-10


def test_closed_form_conditionals_separable():
    c = cfg(10, 2, 2)
    out = pdc.closed_form_output_state(0.9, c)
    rows = pdc.projection_table(out)
    assert len(rows) == 20
    assert abs(sum(r["probability"] for r in rows) - 1) <= 1e-12
    for r in rows:
        assert r["separable"] and r["schmidt_gap"] <= 1e-10
        cond, _ = pdc.project_pump(out, r["n_hat"], r["n_tilde"])
        cond = normalize(cond)
        hat_branch = r["n_tilde"] == r["n_hat"] + 1
        nb = expectation(number_operator("b" if hat_branch else "b~", cond.basis), cond).real
        nc = expectation(number_operator("c" if hat_branch else "c~", cond.basis), cond).real
        assert nb == pytest.approx(1.0, abs=1e-14) and nc == pytest.approx(1.0, abs=1e-14)


def test_separability_examples():
    basis = BasisDescriptor((0, 0, 1, 1, 1, 1))
    prod = basis_state((0, 0, 1, 0, 1, 0), basis)
    assert pdc.separability_check(prod).separable
    ent = normalize(prod + basis_state((0, 0, 0, 1, 0, 1), basis))
    rep = pdc.separability_check(ent)
    assert not rep.separable
    assert rep.gap == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert pdc.schmidt_rank(rep.singular_values) == 2


def test_separability_needs_projected_pump():
    with pytest.raises(ConfigError):
        pdc.separability_check(vacuum(BasisDescriptor.from_pairs(1, 1, 1)))


def test_pump_entangled_with_signal_idler():
    sv = pdc.pump_entanglement_spectrum(pdc.closed_form_output_state(LN2, cfg(8)))
    assert pdc.schmidt_rank(sv) >= 2


def test_single_pump_photon_output_still_entangled():
    # only lambda_1 nonzero: the two branches still differ in (a, a~)
    c = cfg(2)
    s = basis_state((1, 1, 0, 0, 0, 0), c.basis())
    sv = pdc.pump_entanglement_spectrum(lv.first_order_branch(s, c))
    assert pdc.schmidt_rank(sv) == 2


# --- two-photon truncated experiment ------------------------------------------------------

def two_photon_coeffs(bw):
    x = math.exp(-bw)
    pref = math.sqrt(1 - x) / math.sqrt(1 - x ** 3)
    l1, l2 = pref * x ** 0.5, pref * x
    return l1, l2, math.sqrt(2 * l1 ** 2 + 4 * l2 ** 2)


def test_truncated_vacuum():
    c = cfg(4)
    s = pdc.truncated_vacuum_two_photon(LN2, c)
    assert abs(s.norm() - 1) <= 1e-15
    assert s.amplitude((3, 3, 0, 0, 0, 0)) == 0
    assert s.amplitude((1, 1, 0, 0, 0, 0)) == pytest.approx(
        math.exp(-LN2 / 2) * s.amplitude((0, 0, 0, 0, 0, 0)))


def test_truncated_vacuum_needs_cutoff_two():
    with pytest.raises(ConfigError):
        pdc.truncated_vacuum_two_photon(1.0, cfg(1))


@pytest.mark.parametrize("bw", [LN2, 0.2, 3.0])
def test_two_photon_displayed_state(bw):
    c = cfg(3)
    out = pdc.truncated_two_photon_state(bw, c)
    l1, l2, d = two_photon_coeffs(bw)
    r2 = math.sqrt(2)
    want = {
        (0, 1, 1, 0, 1, 0): -1j * l1 / d,
        (1, 0, 0, 1, 0, 1): 1j * l1 / d,
        (1, 2, 1, 0, 1, 0): -1j * l2 * r2 / d,
        (2, 1, 0, 1, 0, 1): 1j * l2 * r2 / d,
    }
    ref = np.zeros(c.basis().total_dim, complex)
    for occ, amp in want.items():
        ref[state_index(occ, c.basis())] = amp
    assert np.abs(out.amplitudes - ref).max() <= 1e-12
    assert abs(out.norm() - 1) <= 1e-14


def test_two_photon_projections():
    c = cfg(3)
    out = pdc.truncated_two_photon_state(LN2, c)
    l1, l2, d = two_photon_coeffs(LN2)
    r2 = math.sqrt(2)
    expect = {
        (0, 0): None,
        (0, 1): ((1, 0, 1, 0), -1j * l1 / d),
        (1, 0): ((0, 1, 0, 1), 1j * l1 / d),
        (2, 1): ((0, 1, 0, 1), 1j * l2 * r2 / d),
        (1, 2): ((1, 0, 1, 0), -1j * l2 * r2 / d),
    }
    for (nh, nt), spec in expect.items():
        cond, p = pdc.project_pump(out, nh, nt)
        if spec is None:
            assert p == 0
            continue
        occ, amp = spec
        want = amp * basis_state((0, 0) + occ, cond.basis).amplitudes
        assert np.abs(cond.amplitudes - want).max() <= 1e-12
        assert p == pytest.approx(abs(amp) ** 2, abs=1e-14)
        assert pdc.separability_check(cond).gap <= 1e-10


def test_projection_table_two_photon():
    rows = pdc.projection_table(pdc.truncated_two_photon_state(LN2, cfg(2)))
    assert {(r["n_hat"], r["n_tilde"]) for r in rows} == {(0, 1), (1, 0), (2, 1), (1, 2)}
    assert all(r["separable"] for r in rows)
