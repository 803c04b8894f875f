"""Fast invariant checks run by ``tfd selftest``."""

from __future__ import annotations

import math

import numpy as np

from . import liouville as lv
from . import pdc
from . import thermofield as tf
from .fock import BasisDescriptor, occupations_of, state_index, vacuum
from .operators import (
    annihilator,
    commutator,
    creator,
    expectation,
    hermiticity_defect,
    local_operator,
)


def _index_bijection():
    b = BasisDescriptor.from_pairs(2, 1, 1)
    return all(state_index(occupations_of(i, b), b) == i for i in range(b.total_dim))


def _canonical_commutation():
    b = BasisDescriptor.from_pairs(4, 1, 1)
    c = commutator(annihilator("a", b), creator("a", b)).toarray()
    n_a = b.mode_occupations("a")
    expected = np.diag(np.where(n_a < 4, 1.0, -4.0))
    return np.abs(c - expected).max() <= 8 * np.finfo(float).eps * 4


def _fermi_dirac():
    p = tf.ThermalParams.from_beta_omega(math.log(3), tf.FERMION)
    v = tf.thermofield_vacuum_closed_form(p, BasisDescriptor.from_pairs(1, 0, 0))
    return abs(tf.mean_occupation(v) - 0.25) < 1e-12


def _bose_einstein():
    p = tf.ThermalParams.from_beta_omega(math.log(2))
    v = tf.thermofield_vacuum_closed_form(p, BasisDescriptor.from_pairs(40, 0, 0))
    return abs(tf.mean_occupation(v) - 1.0) <= tf.occupation_error_bound(p, 40) + 1e-14


def _bogoliubov_fermion():
    p = tf.ThermalParams.from_beta_omega(1.0, tf.FERMION)
    b = BasisDescriptor.from_pairs(1, 0, 0)
    u = tf.apply_bogoliubov(vacuum(b), tf.bogoliubov_generator(tf.mixing_angle(p), b), 1e-14)
    return np.abs(u.amplitudes - tf.thermofield_vacuum_closed_form(p, b).amplitudes).max() < 1e-12


def _liouvillian_hermitian():
    return hermiticity_defect(lv.liouvillian(lv.PdcConfig(cutoff_a=4, cutoff_b=2, cutoff_c=2))) == 0


def _closed_form_branch():
    cfg = lv.PdcConfig(cutoff_a=8, cutoff_b=1, cutoff_c=1)
    beta = math.log(2)
    a = lv.first_order_branch(pdc.build_initial_state(beta, cfg), cfg)
    b = pdc.closed_form_output_state(beta, cfg)
    return np.abs(a.amplitudes - b.amplitudes).max() < 1e-12


def _statistical_equality(seed):
    rng = np.random.default_rng(seed)
    b = BasisDescriptor.from_pairs(4, 0, 0)
    spec = tf.ThermalSpectrum.harmonic(1.0, 5)
    vac = tf.thermofield_vacuum_from_spectrum(spec, 0.8, b)
    worst = 0.0
    for _ in range(10):
        m = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        op = local_operator((m + m.conj().T) / 2, "a", b)
        worst = max(worst, abs(expectation(op, vac) - tf.gibbs_expectation(op, spec, 0.8)))
    return worst <= 1e-12


def _worked_example():
    return abs(pdc.worked_example_sum(60) - 2.5) < 1e-12


CHECKS = [
    ("index bijection", _index_bijection),
    ("canonical commutation below cutoff", _canonical_commutation),
    ("Fermi-Dirac occupation", _fermi_dirac),
    ("Bose-Einstein occupation within tail bound", _bose_einstein),
    ("fermionic Bogoliubov rotation", _bogoliubov_fermion),
    ("Liouvillian Hermitian", _liouvillian_hermitian),
    ("first-order branch equals closed form", _closed_form_branch),
    ("worked-example sum", _worked_example),
]


def run(echo=print, seed: int = 0) -> bool:
    checks = CHECKS + [("random observables match Gibbs averages",
                        lambda: _statistical_equality(seed))]
    ok = True
    for name, fn in checks:
        passed = bool(fn())
        ok &= passed
        echo(f"{'PASS' if passed else 'FAIL'}  {name}")
    return ok
