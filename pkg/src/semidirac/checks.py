"""Algebraic invariant suite for the gamma matrices, su(N) and the symbols."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AbelianField, GaugeField, build_gamma, build_su, field_strength
from .symbols import (
    appendix_a_identities,
    dirac_squared_symbol,
    dirac_symbol,
    principal_eigen,
    squared_symbol_chiral_blocks,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual < self.tolerance)


def _gamma_checks():
    for d in (2, 4):
        gam = build_gamma(d)
        eye = np.eye(gam.size)
        r = 0.0
        for m in range(d):
            for n in range(d):
                ac = gam.gamma[m] @ gam.gamma[n] + gam.gamma[n] @ gam.gamma[m]
                r = max(r, np.abs(ac - 2 * (m == n) * eye).max())
        yield f"gamma_anticommutator_d{d}", r, 1e-14
        herm = max(np.abs(g - g.conj().T).max() for g in gam.gamma)
        yield f"gamma_hermitean_d{d}", herm, 1e-15
    g5 = build_gamma(4).gamma5
    yield "gamma5_chiral", np.abs(g5 - np.diag([1, 1, -1, -1])).max(), 1e-14


def _su_checks():
    for N in (2, 3):
        alg = build_su(N)
        X = alg.generators
        n = alg.n_gen
        tr = np.einsum("aij,bji->ab", X, X)
        yield f"su{N}_trace_norm", np.abs(tr - 2 * np.eye(n)).max(), 1e-13
        yield f"su{N}_traceless_hermitean", max(
            np.abs(np.trace(X, axis1=1, axis2=2)).max(), np.abs(X - X.conj().transpose(0, 2, 1)).max()
        ), 1e-14
        comm = np.einsum("aij,bjk->abik", X, X) - np.einsum("bij,ajk->abik", X, X)
        rhs = 2j * np.einsum("abc,cik->abik", alg.f, X)
        yield f"su{N}_commutator", np.abs(comm - rhs).max(), 1e-13
        anti = np.einsum("aij,bjk->abik", X, X) + np.einsum("bij,ajk->abik", X, X)
        rhs = (4 / N) * np.einsum("ab,ik->abik", np.eye(n), np.eye(N)) + 2 * np.einsum("abc,cik->abik", alg.dsym, X)
        yield f"su{N}_anticommutator", np.abs(anti - rhs).max(), 1e-13
        cas = np.einsum("aij,ajk->ik", X, X)
        yield f"su{N}_casimir", np.abs(cas - alg.casimir2 * np.eye(N)).max(), 1e-13
        jac = 0.0
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    A, B, C = X[a], X[b], X[c]

                    def br(P, Q):
                        return P @ Q - Q @ P

                    jac = max(jac, np.abs(br(br(A, B), C) + br(br(B, C), A) + br(br(C, A), B)).max())
        yield f"su{N}_jacobi", jac, 1e-12


def _symbol_checks(rng):
    gam = build_gamma(4)
    r_sq = 0.0
    r_eig = 0.0
    r_norm = 0.0
    for _ in range(20):
        p = rng.normal(size=4)
        D0 = gam.slash(p)
        r_sq = max(r_sq, np.abs(D0 @ D0 - (p @ p) * np.eye(4)).max())
        ep = principal_eigen(p)
        for V, lam in ((ep.V_plus, ep.lambda_plus), (ep.V_minus, ep.lambda_minus)):
            r_eig = max(r_eig, np.abs(D0 @ V - lam * V).max())
            r_norm = max(r_norm, np.abs(V.conj().T @ V - np.eye(2)).max())
    yield "principal_symbol_square", r_sq, 1e-13
    yield "eigenvector_equation", r_eig, 1e-12
    yield "eigenvector_normalisation", r_norm, 1e-12

    su3 = build_su(3)
    const = GaugeField.constant(su3, rng.normal(size=(4, 8)), g=0.8)
    r = 0.0
    for _ in range(5):
        p = rng.normal(size=4)
        D = dirac_symbol(p, np.zeros(4), const, hbar=0.7)
        r = max(r, np.abs(D @ D - dirac_squared_symbol(p, np.zeros(4), const, hbar=0.7)).max())
    yield "squared_symbol_constant_field", r, 1e-12

    lin = GaugeField.linear(su3, rng.normal(size=(4, 8)), rng.normal(size=(4, 4, 8)), g=0.9)
    r = 0.0
    anti = 0.0
    for _ in range(5):
        p, x = rng.normal(size=4), rng.normal(size=4)
        a = dirac_squared_symbol(p, x, lin, hbar=0.6)
        b = squared_symbol_chiral_blocks(p, x, lin, hbar=0.6)
        r = max(r, np.abs(a - b).max())
        F = field_strength(lin, x).F
        anti = max(anti, np.abs(F + F.transpose(1, 0, 2)).max())
    yield "squared_symbol_chiral_blocks", r, 1e-12
    yield "field_strength_antisymmetry", anti, 1e-15


def _appendix_a(rng, points=100):
    worst = {}
    for _ in range(points):
        fld = AbelianField.linear(rng.normal(size=4), rng.normal(size=(4, 4)), e=rng.uniform(0.2, 2.0))
        p = rng.normal(size=4) + np.array([0, 0, 0, 3.0])
        h = rng.normal(size=(4, 4))
        res = appendix_a_identities(p, rng.normal(size=4), fld, hess=h + h.T)
        for k, v in res.items():
            worst[k] = max(worst.get(k, 0.0), v)
    for k in sorted(worst):
        yield f"appendix_a_{k}", worst[k], 1e-12


def run_algebra_checks(seed: int = 0, perturb: str | None = None) -> list[CheckResult]:
    """Run every invariant; ``perturb`` adds 1e-3 to the named residual."""
    rng = np.random.default_rng(seed)
    out = []
    for gen in (_gamma_checks(), _su_checks(), _symbol_checks(rng), _appendix_a(rng)):
        for name, res, tol in gen:
            out.append(CheckResult(name, float(res), tol))
    if perturb is not None:
        names = [c.name for c in out]
        if perturb not in names:
            raise KeyError(f"unknown check {perturb!r}")
        out = [CheckResult(c.name, c.residual + 1e-3, c.tolerance) if c.name == perturb else c for c in out]
    return out
