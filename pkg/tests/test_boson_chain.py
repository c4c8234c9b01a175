import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zeromodes import boson_chain as bc
from zeromodes import boson_pair as bp
from zeromodes.errors import ZeroModePresent


def test_couplings_periodic_and_dirichlet():
    X, P = bc.build_couplings(bc.ChainSpec(4, 0.5, 2.0))
    assert np.array_equal(P, np.eye(4))
    assert X[0, 0] == pytest.approx(0.25 + 0.5)
    assert X[0, 1] == X[0, 3] == -0.25 and X[0, 2] == 0.0
    Xd, _ = bc.build_couplings(bc.ChainSpec(4, 0.5, 2.0, "dirichlet"))
    assert Xd[0, 3] == 0.0 and Xd[0, 1] == -0.25
    X2, _ = bc.build_couplings(bc.ChainSpec(2, 1.0))
    assert X2[0, 1] == -2.0


def test_spec_validation():
    for args in ((1, 1.0), (3.5, 1.0), (4, -1.0), (4, 1.0, 0.0)):
        with pytest.raises(ValueError):
            bc.ChainSpec(*args)


def test_ground_state_is_pure():
    X, P = bc.build_couplings(bc.ChainSpec(30, 0.3))
    assert bc.ground_covariance(X, P).purity_defect() < 1e-10


def test_massless_periodic_chain_has_zero_mode():
    X, P = bc.build_couplings(bc.ChainSpec(10, 0.0))
    with pytest.raises(ZeroModePresent):
        bc.ground_covariance(X, P)
    with pytest.raises(ZeroModePresent):
        bc.chain_entropy(bc.ChainSpec(10, 0.0))
    rep = bc.zero_mode_report(bc.ChainSpec(10, 0.0))
    assert rep.chain_min_freq == pytest.approx(0.0, abs=1e-7)
    assert rep.ent_min_freq == 0.0 and rep.near_zero_tower == 1


def test_massless_dirichlet_chain_is_fine():
    rep = bc.chain_entropy(bc.ChainSpec(20, 0.0, boundary="dirichlet"))
    assert math.isfinite(rep.entropy) and rep.entropy > 0
    assert rep.chain_min_freq == pytest.approx(2 * math.sin(math.pi / 42), rel=1e-9)


@given(st.floats(0.0, 3.0), st.floats(1e-2, 3.0), st.floats(0.0, 3.0), st.floats(1e-2, 3.0))
def test_two_site_pipeline_matches_closed_form(k, u, m, v):
    c = bp.PairCouplings(k + u, k, m + v, m)
    cov = bc.ground_covariance(*c.matrices())
    nu = bc.symplectic_spectrum(bc.reduce(cov, [0])).symplectic_eigenvalues[0]
    assert nu == pytest.approx(bp.symplectic_eigenvalue(c), rel=1e-9)


def test_routes_agree_and_respect_bound():
    X, P = bc.build_couplings(bc.ChainSpec(24, 0.05))
    cov = bc.ground_covariance(X, P)
    form, prod = bc.symplectic_routes(bc.reduce(cov, range(8)))
    assert np.allclose(form, prod, rtol=1e-9)
    assert prod.min() >= 0.5 - 1e-9


def test_whole_chain_is_pure_and_complement_symmetric():
    spec = bc.ChainSpec(16, 0.2)
    whole = bc.chain_entropy(spec, range(16))
    assert whole.entropy == pytest.approx(0.0, abs=1e-8)
    assert np.allclose(whole.spectrum.symplectic_eigenvalues, 0.5, atol=1e-9)
    a = bc.chain_entropy(spec, [0, 1, 2, 7, 9]).entropy
    b = bc.chain_entropy(spec, [s for s in range(16) if s not in (0, 1, 2, 7, 9)]).entropy
    assert a == pytest.approx(b, rel=1e-9)


def test_entanglement_frequencies_match_arccoth():
    nu = np.array([0.5, 0.5 + 1e-14, 0.51, 1.0, 7.0, 1e6])
    mu = bc.entanglement_frequencies(nu)
    assert mu[0] == math.inf and mu[1] == math.inf
    assert np.allclose(mu[2:], 2 * np.arctanh(1 / (2 * nu[2:])), rtol=1e-12)


def test_mass_scan_monotone():
    masses = np.geomspace(1.0, 1e-3, 7)
    reps = [bc.chain_entropy(bc.ChainSpec(50, m), range(10)) for m in masses]
    S = [r.entropy for r in reps]
    assert np.all(np.diff(S) > 0)
    assert np.all(np.diff([r.min_mu for r in reps]) < 0)
    assert np.all(np.diff([r.max_nu for r in reps]) > 0)
    assert [r.chain_min_freq for r in reps] == pytest.approx(list(masses), rel=1e-6)


def test_zero_mode_tower_counts_small_frequencies():
    rep = bc.zero_mode_report(bc.ChainSpec(40, 1e-6), range(20), eps_zero=1.0)
    assert rep.near_zero_tower >= 1
    assert rep.ent_min_freq < 1.0
    assert bc.zero_mode_report(bc.ChainSpec(40, 1.0), range(20)).near_zero_tower == 0


def test_default_subsystem_is_first_half():
    spec = bc.ChainSpec(12, 0.4)
    assert bc.chain_entropy(spec).sites == tuple(range(6))


def test_reduce_validation():
    X, P = bc.build_couplings(bc.ChainSpec(6, 1.0))
    cov = bc.ground_covariance(X, P)
    for sites in ([], [2, 1], [0, 6], [-1, 2], [1, 1]):
        with pytest.raises(ValueError):
            bc.reduce(cov, sites)


def test_custom_couplings_override():
    X = np.array([[2.0, 1.0], [1.0, 2.0]])
    rep = bc.chain_entropy(bc.ChainSpec(2, 1.0), [0], couplings=(X, np.eye(2)))
    assert rep.entropy == pytest.approx(bp.pair_entropy(bp.PairCouplings(2.0, 1.0, 1.0, 0.0)), rel=1e-10)
