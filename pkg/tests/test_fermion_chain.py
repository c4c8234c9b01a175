import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from zeromodes import fermion_chain as fc
from zeromodes.errors import ConsistencyError, DegenerateMode, DomainError

# single-cell entropy at K = 0 with N = 4096 cells, frozen from the momentum-sum route
S_L1_K0 = 0.9478932439838017


def projector_oracle(N, m, a=1.0):
    """<c_i^dag c_j> on 2N sites, built from scratch: hopping i/(2a), staggered mass,
    antiperiodic wrap, all negative-energy levels filled."""
    n = 2 * N
    H = np.zeros((n, n), dtype=complex)
    for j in range(n):
        H[j, j] = m if j % 2 == 0 else -m
        sign = -1.0 if j == n - 1 else 1.0
        H[j, (j + 1) % n] += sign * 0.5j / a
        H[(j + 1) % n, j] += -sign * 0.5j / a
    w, V = np.linalg.eigh(H)
    occ = V[:, w < 0]
    return occ.conj() @ occ.T


def test_momentum_grid():
    assert fc.momentum_grid(2) == pytest.approx([-math.pi / 4, math.pi / 4])
    assert fc.momentum_grid(4) == pytest.approx([-3 * math.pi / 8, -math.pi / 8, math.pi / 8, 3 * math.pi / 8])
    k = fc.momentum_grid(64, 0.5)
    assert np.allclose(k, -k[::-1]) and len(set(k)) == 64
    assert np.all(np.abs(k) < math.pi / (2 * 0.5)) and np.all(np.sin(k * 0.5) != 0)
    for bad in (3, 0, 2.5):
        with pytest.raises(ValueError):
            fc.momentum_grid(bad)


def test_bloch_examples():
    assert fc.bloch_diagonalize(math.pi / 4, 0.0).omega == pytest.approx(math.sqrt(0.5), rel=1e-15)
    assert fc.bloch_diagonalize(math.pi / 6, 1.0).omega == pytest.approx(math.sqrt(1.25), rel=1e-15)
    heavy = fc.bloch_diagonalize(0.3, 1e8)
    assert abs(heavy.alpha) ** 2 == pytest.approx(1.0, abs=1e-15) and abs(heavy.beta) ** 2 < 1e-16
    with pytest.raises(DegenerateMode):
        fc.bloch_diagonalize(0.0, 0.0)


@given(st.floats(-1.5, 1.5), st.floats(-5.0, 5.0), st.floats(0.1, 3.0))
def test_bloch_eigenvector(k, m, a):
    if abs(m) < 1e-6 and abs(math.sin(k * a)) < 1e-6:
        return
    mode = fc.bloch_diagonalize(k, m, a)
    u = np.array([mode.alpha, mode.beta])
    M = fc.bloch_matrix(k, m, a)
    assert np.allclose(M, M.conj().T)
    assert np.abs(M @ u - mode.omega * u).max() <= 1e-12 * max(1.0, mode.omega)
    assert abs(mode.alpha) ** 2 + abs(mode.beta) ** 2 == pytest.approx(1.0, abs=1e-12)
    assert mode.omega**2 == pytest.approx(m**2 + math.sin(k * a) ** 2 / a**2, rel=1e-12, abs=1e-14)
    assert mode.alpha.imag == 0.0 and mode.alpha.real >= 0.0


def test_bloch_matrix_matches_exponential_form():
    k, a, m = 0.37, 0.8, 0.6
    h = 0.5j / a * (1 - np.exp(-2j * k * a))
    assert fc.bloch_matrix(k, m, a) == pytest.approx(np.array([[m, h], [np.conj(h), -m]]), abs=1e-15)


@pytest.mark.parametrize("N,m", [(2, 0.3), (16, 0.0), (16, 1.0), (64, 0.1), (64, 1.0), (64, 10.0)])
def test_blocks_match_projector_oracle(N, m):
    C = projector_oracle(N, m)
    spec = fc.FermionSpec(N, m)
    blocks = fc.correlation_blocks(N, spec)
    for d in range(-(N - 1), N):
        i, j = (d, 0) if d >= 0 else (0, -d)
        assert np.abs(blocks[d + N - 1] - C[2 * i:2 * i + 2, 2 * j:2 * j + 2]).max() <= 1e-9
    assert np.abs(fc.assemble_correlation(N, spec).matrix - C).max() <= 1e-9


def test_direct_sum_matches_fft():
    spec = fc.FermionSpec(64, 1.0)
    blocks = fc.correlation_blocks(10, spec)
    for d in (-9, -3, 0, 1, 9):
        assert np.abs(fc.correlation_block(d, spec) - blocks[d + 9]).max() <= 1e-14
    with pytest.raises(ValueError):
        fc.correlation_block(64, spec)


def test_block_limits():
    A0 = fc.correlation_block(0, fc.FermionSpec(64, 0.0))
    assert A0[0, 0].real == pytest.approx(0.5, abs=1e-14) and A0[1, 1].real == pytest.approx(0.5, abs=1e-14)
    heavy = fc.correlation_block(0, fc.FermionSpec(64, 1e6))
    assert heavy[0, 0].real == pytest.approx(0.0, abs=1e-9)  # <b^dag b>: b carries +m and empties
    assert heavy[1, 1].real == pytest.approx(1.0, abs=1e-9)


def test_single_cell_matrix_closed_form():
    spec = fc.FermionSpec(128, 0.7)
    _, omega, _, _ = fc.bloch_modes(spec)
    A0 = fc.assemble_correlation(1, spec).matrix
    assert A0[0, 0].real == pytest.approx(np.mean((omega - 0.7) / (2 * omega)), rel=1e-13)
    assert A0[1, 1].real == pytest.approx(np.mean((omega + 0.7) / (2 * omega)), rel=1e-13)


@pytest.mark.parametrize("N", [16, 64])
@pytest.mark.parametrize("K", [0.0, 0.1, 1.0, 10.0])
def test_pairing_purity_and_structure(N, K):
    spec = fc.FermionSpec.from_K(K, N)
    full = fc.assemble_correlation(N, spec)
    C = full.matrix
    assert np.abs(C @ C - C).max() <= 1e-9
    assert np.allclose(np.sort(full.eigenvalues), np.repeat([0.0, 1.0], N), atol=1e-9)
    assert np.array_equal(C, C.conj().T)
    for L in (1, 2, N // 2):
        corr = fc.assemble_correlation(L, spec)
        lam = corr.eigenvalues
        assert np.abs(lam + lam[::-1] - 1.0).max() <= 1e-9
        for i in range(L):
            for j in range(L):
                assert np.abs(corr.matrix[2 * i:2 * i + 2, 2 * j:2 * j + 2] - corr.block(i - j)).max() <= 1e-15


def test_assemble_reuses_larger_blocks():
    spec = fc.FermionSpec(256, 0.0)
    big = fc.correlation_blocks(20, spec)
    a = fc.assemble_correlation(7, spec, big)
    b = fc.assemble_correlation(7, spec)
    assert np.allclose(a.matrix, b.matrix, atol=1e-15)
    with pytest.raises(ValueError):
        fc.assemble_correlation(30, spec, big)
    with pytest.raises(ValueError):
        fc.assemble_correlation(0, spec)


def test_massless_two_cell_pairing():
    lam = fc.assemble_correlation(2, fc.FermionSpec(256, 0.0)).eigenvalues
    assert lam + lam[::-1] == pytest.approx(np.ones(4), abs=1e-9)


def test_entropy_examples():
    assert fc.fermion_entropy(np.array([0.0, 1.0, 1.0, 0.0])) == 0.0
    assert fc.fermion_entropy(np.array([0.5, 0.5])) == pytest.approx(2 * math.log(2), rel=1e-15)
    assert fc.fermion_entropy(np.array([-5e-10, 1 + 5e-10])) == 0.0
    for bad in ([-1e-5], [1.0 + 2e-6]):
        with pytest.raises(ConsistencyError):
            fc.fermion_entropy(np.array(bad))


@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=20))
def test_entropy_bounds(lam):
    S = fc.fermion_entropy(np.array(lam))
    assert -1e-15 <= S <= len(lam) * math.log(2) + 1e-12


def test_single_cell_massless_golden():
    assert fc.entropy(0.0, 1) == pytest.approx(S_L1_K0, rel=1e-12)
    lo, hi = fc.single_site_analytics(0.0).lambda_numeric
    assert lo == pytest.approx(0.5 - 1 / math.pi, abs=1e-6)
    assert hi == pytest.approx(0.5 + 1 / math.pi, abs=1e-6)


def test_thermodynamic_convergence():
    assert fc.convergence_gap(1.0, 8) < 1e-8
    # the massless chain converges only algebraically, like (L/N)^2
    assert fc.convergence_gap(0.0, 16) < 1e-4


def test_scale_invariance():
    base = fc.entropy_curve(0.4, [3], 512)[0]
    for s in (0.5, 2.0, 7.0):
        spec = fc.FermionSpec(512, 0.4 / s, s)
        assert fc.fermion_entropy(fc.assemble_correlation(3, spec)) == pytest.approx(base, rel=1e-12)


def test_entropy_monotone_in_L():
    for K in (0.0, 0.1, 1.0):
        S = fc.entropy_curve(K, range(1, 41))
        assert np.all(np.diff(S) >= -1e-12)


def elliptic_delta_oracle(K):
    m = -1 / K**2
    F = integrate.quad(lambda t: (1 - m * math.sin(t) ** 2) ** -0.5, 0, math.pi / 2, epsrel=1e-13)[0]
    E = integrate.quad(lambda t: (1 - m * math.sin(t) ** 2) ** 0.5, 0, math.pi / 2, epsrel=1e-13)[0]
    return math.hypot(K * (F - E), F)


@pytest.mark.parametrize("K", [0.5, 1.0, 2.0, 5.0])
def test_single_site_analytics(K):
    r = fc.single_site_analytics(K)
    lo, hi = r.lambda_numeric
    assert lo + hi == pytest.approx(1.0, abs=1e-9)
    assert r.delta == pytest.approx(elliptic_delta_oracle(K), rel=1e-10)
    assert r.ratio == pytest.approx(1 / math.pi, rel=1e-9)


def test_printed_prefactor_leaves_unit_interval():
    lo, hi = fc.single_site_analytics(1.0).lambda_printed
    assert lo < 0 and hi > 1


def test_single_site_limits():
    r = fc.single_site_analytics(1e4)
    assert r.lambda_numeric[0] < 1e-8 and r.lambda_numeric[1] > 1 - 1e-8 and r.entropy < 1e-6
    z = fc.single_site_analytics(0.0)
    assert math.isnan(z.delta) and math.isnan(z.ratio)
    with pytest.raises(DomainError):
        fc.single_site_analytics(-1.0)


def test_asymptotic_golden_ratio():
    est = fc.asymptotic_entropy(1.0)
    phi = (1 + math.sqrt(5)) / 2
    assert est.roots == pytest.approx((phi - 1, -phi), rel=1e-15)
    assert fc.asymptotic_entropy(1e-3).small_K_law == pytest.approx(2.302585, rel=1e-6)


@given(st.floats(1e-6, 1e6))
def test_asymptotic_root_geometry(K):
    est = fc.asymptotic_entropy(K)
    zp, zm = est.roots
    assert zp * zm == pytest.approx(-1.0, rel=1e-12)
    assert -(zp**2) / K - zp + 1 / K == pytest.approx(0.0, abs=1e-12 * max(1.0, 1 / K))
    assert sum(abs(z) < 1 for z in est.roots) == 1
    assert est.S_estimate == pytest.approx(est.small_K_law, rel=1e-9, abs=1e-12)


def test_asymptotic_domain():
    for bad in (0.0, -1.0, math.inf):
        with pytest.raises(DomainError):
            fc.asymptotic_entropy(bad)


@pytest.mark.parametrize("K", [1.0, 0.1, 3.0])
def test_rescaled_hamiltonian(K):
    spec = fc.FermionSpec.from_K(K, 16)
    r = fc.rescaled_hamiltonian_check(spec, L=4)
    assert r.passed, (r.eigenvalues_dirac, r.eigenvalues_rescaled)
    for s in (0.5, 2.0):
        assert fc.rescaled_hamiltonian_check(spec, L=4, scale=s).entropy_rescaled == pytest.approx(r.entropy_dirac, abs=1e-9)


def test_rescaled_matches_momentum_route():
    spec = fc.FermionSpec.from_K(0.5, 16)
    r = fc.rescaled_hamiltonian_check(spec, L=3)
    assert r.entropy_rescaled == pytest.approx(fc.fermion_entropy(fc.assemble_correlation(3, spec)), abs=1e-10)


def test_rescaled_needs_mass():
    with pytest.raises(DomainError):
        fc.rescaled_hamiltonian_check(fc.FermionSpec(16, 0.0))


def test_continuum_dispersion_first_order():
    # relative error ~ (ka)^2 / 6 at K = 0, smaller for K > 0
    e1 = fc.continuum_dispersion_error(0.0, 0.1)
    e2 = fc.continuum_dispersion_error(0.0, 0.05)
    assert e1 == pytest.approx(1 - math.sin(0.1) / 0.1, rel=1e-12)
    assert e1 / e2 == pytest.approx(4.0, rel=1e-2)
    for K in (0.1, 1.0):
        assert fc.continuum_dispersion_error(K) < e1


def test_eigenvalues_approach_half_as_L_grows():
    dist = []
    for L in (8, 16, 32, 64, 128):
        lam = fc.assemble_correlation(L, fc.FermionSpec.thermodynamic(0.0, L)).eigenvalues
        dist.append(np.min(np.abs(lam - 0.5)))
    assert np.all(np.diff(dist) < 0)
    assert fc.count_near_half([0.5, 0.46, 0.56, 0.0]) == 2


def test_spec_validation():
    for args in ((3, 1.0), (0, 1.0), (4, -1.0), (4, 1.0, 0.0)):
        with pytest.raises(ValueError):
            fc.FermionSpec(*args)
    assert fc.FermionSpec(8, 2.0, 0.5).K == 1.0
    assert fc.FermionSpec.thermodynamic(1.0, 2000).n_cells == 8000
