import _env

import numpy as np
from numpy.testing import assert_allclose
import pytest

from neutronsim.hilbert import tensor_core as tc
from neutronsim.states import channels, samplers, targets


def test_symmetric_w_amplitudes_carry_flip_phase():
    w = targets.make_w(targets.WParams.symmetric())
    assert_allclose(w.amplitude(tc.BasisLabel.parse('101')), 1/np.sqrt(3))
    assert_allclose(w.amplitude(tc.BasisLabel.parse('011')), 1j/np.sqrt(3))
    assert_allclose(w.amplitude(tc.BasisLabel.parse('002')), 1/np.sqrt(3))


def test_ghz_with_zero_e_is_a_basis_state():
    ghz = targets.make_ghz(targets.GHZParams(d=1., e=0.))
    assert_allclose(ghz.amplitudes, 1j*tc.basis_vector('101'))


@pytest.mark.parametrize('values', [(1., 1., 1.), (-.5, .5, 1/np.sqrt(2))])
def test_w_params_validation(values):
    with pytest.raises(ValueError):
        targets.WParams(*values)


def test_make_target_kinds():
    for kind in targets.TARGET_KINDS:
        assert isinstance(targets.make_target(kind), tc.PureState)
    with pytest.raises(ValueError):
        targets.make_target('cluster')


def test_biseparable_sampler_is_seeded():
    first = samplers.sample_biseparable(seed=11)
    second = samplers.sample_biseparable(seed=11)
    assert_allclose(first.entries, second.entries)
    assert not np.allclose(first.entries,
                           samplers.sample_biseparable(seed=12).entries)


def test_single_term_ksep_sample_is_a_pure_product():
    rho = samplers.sample_ksep(3, seed=2, n_terms=1)
    assert_allclose(np.trace(rho.entries @ rho.entries).real, 1., atol=1e-12)
    vector = np.linalg.eigh(rho.entries)[1][:, -1]
    factors = tc.factorize_product(vector)
    assert_allclose(abs(np.vdot(tc.kron(*factors), vector)), 1., atol=1e-9)


def test_fixed_bipartition_terms_factor_across_it():
    partition = samplers.BIPARTITIONS[0]
    rho = samplers.sample_biseparable(seed=5, n_terms=1, partition=partition)
    vector = np.linalg.eigh(rho.entries)[1][:, -1]
    # path | spin-energy: the 2 x 6 unfolding has rank one
    singular = np.linalg.svd(vector.reshape(2, 6), compute_uv=False)
    assert singular[1] < 1e-9


def test_sample_ksep_rejects_other_orders():
    with pytest.raises(ValueError):
        samplers.sample_ksep(4, seed=0)


def test_random_density_rank_one_is_pure():
    rho = samplers.random_density(seed=3, rank=1)
    assert_allclose(np.trace(rho.entries @ rho.entries).real, 1., atol=1e-10)


@pytest.mark.parametrize('kind, slope', [('W_sym', 4/9), ('W_asym', 1/2)])
def test_dephased_fidelity_is_linear_in_p(kind, slope):
    target = targets.make_target(kind)
    rho = target.density()
    for p in (0., .25, .5, .75, 1.):
        assert_allclose(channels.fidelity(channels.path_dephase(rho, p),
                                          target),
                        1 - slope*p, atol=1e-12)


def test_full_dephasing_keeps_in_path_coherence():
    rho = channels.path_dephase(targets.make_target('W_sym').density(), 1.)
    b, c, a = (tc.BasisLabel.parse(s) for s in ('011', '002', '101'))
    assert abs(rho.element(a, b)) == 0.
    assert abs(rho.element(a, c)) == 0.
    assert_allclose(abs(rho.element(b, c)), 1/3)


def test_dephasing_strength_range():
    with pytest.raises(ValueError):
        channels.DephasingStrength(1.5)
    with pytest.raises(ValueError):
        channels.path_dephase(tc.DensityMatrix.maximally_mixed(), -.1)


def test_path_projectors_resolve_identity():
    assert_allclose(channels.path_projector(0) + channels.path_projector(1),
                    np.eye(tc.DIM))


def test_target_support_matches_labels():
    for params, make, labels in (
            (targets.WParams(.6, .48, .64), targets.make_w, targets.W_LABELS),
            (targets.GHZParams.balanced(), targets.make_ghz,
             targets.GHZ_LABELS)):
        amplitudes = make(params).amplitudes
        support = {str(tc.label_from_index(i))
                   for i in np.flatnonzero(abs(amplitudes) > 1e-12)}
        assert support == set(labels)


def test_full_dephasing_is_idempotent():
    rho = samplers.random_density(seed=11)
    once = channels.path_dephase(rho, 1.)
    assert_allclose(channels.path_dephase(once, 1.).entries, once.entries,
                    atol=1e-15)


@pytest.mark.parametrize('p, q', [(.2, .5), (.7, .1), (0., .3), (1., .4)])
def test_dephasing_composes(p, q):
    rho = samplers.random_density(seed=12)
    twice = channels.path_dephase(channels.path_dephase(rho, p), q)
    combined = channels.path_dephase(rho, 1 - (1 - p)*(1 - q))
    assert_allclose(twice.entries, combined.entries, atol=1e-14)


def test_product_state_places_factors_by_subsystem():
    energy_spin = np.zeros(6)
    energy_spin[1*3 + 1] = 1.
    state = samplers.product_state(
        (tc.SubsystemSet(1), tc.SubsystemSet(2, 3)),
        [np.array([1., 0.]), energy_spin])
    assert_allclose(state.amplitudes, tc.basis_vector('011'), atol=1e-15)
