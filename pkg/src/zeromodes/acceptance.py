"""Acceptance suite: twelve end-to-end checks, each returning a verdict line.

Every check runs at its stated tolerance; nothing is relaxed to make a
check pass.  ``run_all`` is shared by ``tests/test_acceptance.py`` and the
``verify`` CLI subcommand.
"""

import math
import time
from dataclasses import dataclass

import numpy as np

from . import boson_chain, boson_pair, fermion_chain, scanlab

__all__ = ["CriterionResult", "CRITERIA", "run_criterion", "run_all", "format_result"]


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def _product_state():
    vals = {lam: boson_pair.product_state_check(lam) for lam in (0.0, 0.5, 0.999)}
    worst = max(abs(s) for s in vals.values())
    return worst <= 1e-10, f"max |S| = {worst:.3e} over lambda in {sorted(vals)}"


def _path_dichotomy():
    base = boson_pair.PairCouplings(2.0, 1.0, 2.0, 1.0)
    p2 = boson_pair.DegeneracyPath(base, boson_pair.PathKind.PATH_II)
    taus = (0.0, 0.25, 0.5, 0.9, 0.99, 1.0 - 1e-4, 1.0 - 1e-6, 1.0 - 1e-8)
    s2 = np.array([boson_pair.path_entropy(p2, t) for t in taus])
    spread = float(s2.max() - s2.min())
    ok = spread <= 1e-9 and math.isfinite(s2[-1])
    parts = [f"II spread {spread:.2e}"]
    for kind in (boson_pair.PathKind.PATH_I, boson_pair.PathKind.PATH_III):
        path = boson_pair.DegeneracyPath(base, kind)
        q = np.array([2, 4, 6, 8])
        s = np.array([boson_pair.path_entropy(path, 1.0 - 10.0 ** (-qq)) for qq in q])
        slopes = np.diff(s) / (np.diff(q) * math.log(10.0))
        rel = float((slopes.max() - slopes.min()) / slopes.mean())
        ok = ok and bool(np.all(np.diff(s) > 0)) and rel <= 0.05
        parts.append(f"{kind.value} slopes {np.round(slopes, 4).tolist()} spread {rel:.3f}")
    return ok, "; ".join(parts)


def _random_couplings(rng):
    k, m = rng.uniform(0.0, 3.0, 2)
    u, v = 10.0 ** rng.uniform(-3, 1, 2)
    return boson_pair.PairCouplings(k + u, k, m + v, m)


def _closed_form_vs_pipeline(seed=1):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(100):
        c = _random_couplings(rng)
        X, P = c.matrices()
        cov = boson_chain.ground_covariance(X, P)
        nu = boson_chain.symplectic_spectrum(boson_chain.reduce(cov, [0])).symplectic_eigenvalues[0]
        a = boson_pair.symplectic_eigenvalue(c)
        worst = max(worst, abs(nu - a) / a)
    return worst <= 1e-9, f"max relative gap {worst:.3e} over 100 coupling sets"


def _spectral_identity(seed=2):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(3, 9))
        M = rng.normal(size=(n, n))
        X = M @ M.T + 0.5 * np.eye(n)
        M = rng.normal(size=(n, n))
        P = M @ M.T + 0.5 * np.eye(n)
        cov = boson_chain.ground_covariance(X, P)
        size = int(rng.integers(1, n))
        sites = np.sort(rng.choice(n, size=size, replace=False))
        form, prod = boson_chain.symplectic_routes(boson_chain.reduce(cov, sites))
        worst = max(worst, float(np.max(np.abs(form - prod) / prod)))
    return worst <= 1e-9, f"max relative gap {worst:.3e} over 100 reduced states"


def _comonotone():
    masses = np.geomspace(1.0, 1e-3, 10)
    trajectories = [
        (ell, bc) for ell in (4, 8, 12, 16, 20) for bc in ("periodic", "dirichlet")
    ]
    bad = []
    for ell, bc in trajectories:
        S, nu, inv_mu = [], [], []
        for m in masses:
            rep = boson_chain.chain_entropy(boson_chain.ChainSpec(40, m, 1.0, bc), range(ell))
            S.append(rep.entropy)
            nu.append(rep.max_nu)
            inv_mu.append(1.0 / rep.min_mu)
        if not all(np.all(np.diff(v) > 0) for v in (S, nu, inv_mu)):
            bad.append((ell, bc))
    return not bad, f"{len(trajectories) - len(bad)}/{len(trajectories)} trajectories co-monotone" + (
        f", failing {bad}" if bad else ""
    )


def _fermion_pairing():
    worst_pair = worst_proj = 0.0
    for N in (16, 64):
        for K in (0.0, 0.1, 1.0, 10.0):
            spec = fermion_chain.FermionSpec.from_K(K, N)
            for L in (1, N // 4, N // 2, N):
                lam = fermion_chain.assemble_correlation(L, spec).eigenvalues
                worst_pair = max(worst_pair, float(np.max(np.abs(lam + lam[::-1] - 1.0))))
            C = fermion_chain.assemble_correlation(N, spec).matrix
            worst_proj = max(worst_proj, float(np.abs(C @ C - C).max()))
    ok = worst_pair <= 1e-9 and worst_proj <= 1e-9
    return ok, f"pairing defect {worst_pair:.2e}, projector defect {worst_proj:.2e}"


def _central_charge():
    Ls = list(range(16, 129))
    S = fermion_chain.entropy_curve(0.0, Ls)
    fit = scanlab.fit_log((Ls, S), window=(0, len(Ls)))
    ok = abs(fit.A - 1.0 / 3.0) <= 0.01 and abs(fit.B - 0.955) <= 0.05
    return ok, f"A = {fit.A:.5f}, B = {fit.B:.5f}, rms {fit.residual_rms:.2e}"


def _small_K_law():
    vals = [fermion_chain.entropy(K, 64) + math.log(K) / 3.0 for K in (1e-1, 1e-2, 1e-3)]
    drift = max(vals) - min(vals)
    return drift < 0.05, f"S(64,K) + ln(K)/3 = {np.round(vals, 4).tolist()}, drift {drift:.4f}"


def _saturation():
    S = fermion_chain.entropy_curve(3.0, range(1, 33))
    dev = float(np.max(np.abs(S - S[0]) / S[0]))
    tab = scanlab.saturation_vs_L1((20.0, 30.0, 50.0))
    gaps = [r["rel_gap"] for r in tab.rows]
    ok = dev < 0.02 and all(g < 0.05 for g in gaps)
    return ok, f"K=3 max rel deviation {dev:.2e}; K=20,30,50 gaps {[f'{g:.1e}' for g in gaps]}"


def _accumulation():
    counts = []
    for L in (8, 16, 32, 64):
        lam = fermion_chain.assemble_correlation(L, fermion_chain.FermionSpec.thermodynamic(0.0, L)).eigenvalues
        counts.append(fermion_chain.count_near_half(lam, 0.05))
    ok = all(b >= a for a, b in zip(counts, counts[1:])) and counts[-1] >= 2 * counts[0] and counts[0] > 0
    return ok, f"counts within 0.05 of 1/2 for L=8,16,32,64: {counts}"


def _continuum():
    errs = {K: fermion_chain.continuum_dispersion_error(K) for K in (0.0, 0.1, 1.0)}
    worst = max(errs.values())
    return worst <= 1e-3, "max rel error " + ", ".join(f"K={K}: {e:.2e}" for K, e in errs.items())


def _elliptic():
    ratios = [fermion_chain.single_site_analytics(K).ratio for K in (0.5, 1.0, 2.0, 5.0)]
    spread = (max(ratios) - min(ratios)) / abs(np.mean(ratios))
    return spread <= 0.01, f"(lambda+ - 1/2)/Delta = {np.round(ratios, 10).tolist()}, spread {spread:.1e}"


CRITERIA = {
    1: ("product state has zero entropy", _product_state),
    2: ("path dichotomy", _path_dichotomy),
    3: ("closed form vs covariance pipeline", _closed_form_vs_pipeline),
    4: ("symplectic spectral identity", _spectral_identity),
    5: ("entropy / entanglement-frequency co-monotonicity", _comonotone),
    6: ("fermion pairing and purity", _fermion_pairing),
    7: ("central-charge prefactor", _central_charge),
    8: ("small-K law", _small_K_law),
    9: ("saturation and L-insensitivity", _saturation),
    10: ("accumulation at 1/2", _accumulation),
    11: ("continuum dispersion", _continuum),
    12: ("elliptic cross-check", _elliptic),
}


def run_criterion(number):
    name, fn = CRITERIA[number]
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed criterion, reported as such
        ok, detail = False, f"raised {type(exc).__name__}: {exc}"
    return CriterionResult(number, name, bool(ok), detail, time.perf_counter() - t0)


def run_all(only=None):
    return [run_criterion(n) for n in (sorted(only) if only else sorted(CRITERIA))]


def format_result(r):
    return f"[{'PASS' if r.passed else 'FAIL'}] {r.number:2d} {r.name}: {r.detail} ({r.seconds:.1f}s)"
