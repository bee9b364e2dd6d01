"""Weyl symbols of the Dirac operator and the classical Hamiltonians derived from them.

Matrices act on spinor (x) colour space, in that tensor order.  Momenta and
positions are d-vectors with the Euclidean time component last.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .algebra import (
    SIGMA,
    AbelianField,
    GaugeField,
    build_gamma,
    field_strength,
    pauli_dot,
)

__all__ = [
    "Couplings",
    "DomainError",
    "SingularPointError",
    "EigenPair",
    "HamiltonianKind",
    "dirac_symbol",
    "principal_eigen",
    "eigenvectors",
    "classical_hamiltonian",
    "dirac_squared_symbol",
    "squared_symbol_chiral_blocks",
    "appendix_a_identities",
]

_I2 = np.eye(2, dtype=complex)


class DomainError(ValueError):
    """A square-root Hamiltonian was evaluated at a negative radicand."""

    def __init__(self, radicand: float, kind=None):
        self.radicand = float(radicand)
        self.kind = kind
        super().__init__(f"negative radicand {self.radicand:.6g} for {kind}")


class SingularPointError(ValueError):
    pass


@dataclass(frozen=True)
class Couplings:
    """Coupling constants; ``g``/``e`` default to the ones carried by the field."""

    g: float | None = None
    e: float | None = None
    hbar: float = 1.0

    def resolve_g(self, field: GaugeField) -> float:
        if self.g is None:
            return field.g
        if not np.isclose(self.g, field.g, rtol=0, atol=0):
            raise ValueError(f"coupling g={self.g} disagrees with field.g={field.g}")
        return self.g

    def resolve_e(self, field: AbelianField) -> float:
        if self.e is None:
            return field.e
        if self.e != field.e:
            raise ValueError(f"charge e={self.e} disagrees with field.e={field.e}")
        return self.e


class HamiltonianKind(enum.Enum):
    FreePlus = ("free", +1)
    FreeMinus = ("free", -1)
    AbelianPlus = ("abelian", +1)
    AbelianMinus = ("abelian", -1)
    WongPlus = ("wong", +1)
    WongMinus = ("wong", -1)
    PauliPlus = ("pauli", +1)
    PauliMinus = ("pauli", -1)
    SqrtPlus = ("sqrt", +1)
    SqrtMinus = ("sqrt", -1)
    TriplePlus = ("triple", +1)
    TripleMinus = ("triple", -1)

    @property
    def family(self) -> str:
        return self.value[0]

    @property
    def sign(self) -> int:
        return self.value[1]


def dirac_symbol(p, x, field: GaugeField, hbar: float = 1.0) -> np.ndarray:
    """``D(p, x) = gamma_mu (p_mu - (hbar g / 2) X^a A_mu^a(x))``.

    Returns a Hermitean ``(n_s J) x (n_s J)`` matrix with ``n_s = 4`` for
    d = 4 and ``n_s = 2`` for d = 2.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (field.d,):
        raise ValueError(f"momentum has shape {p.shape}, field lives in d={field.d}")
    gam = build_gamma(field.d)
    J = field.algebra.dim_rep
    kin = p[:, None, None] * np.eye(J) - hbar * field.g * field.matrix_potential(x)
    return sum(np.kron(gam.gamma[mu], kin[mu]) for mu in range(field.d))


@dataclass(frozen=True)
class EigenPair:
    lambda_plus: float
    lambda_minus: float
    V_plus: np.ndarray  # (4, 2)
    V_minus: np.ndarray  # (4, 2)


def _w(pi):
    # pi_4 + i sigma.pi (upper sign) as used in the eigenvector blocks
    return pi[3] * _I2 + 1j * pauli_dot(pi[:3])


def _wbar(pi):
    return pi[3] * _I2 - 1j * pauli_dot(pi[:3])


def eigenvectors(pi) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvector matrices ``V_+``, ``V_-`` of ``gamma_mu pi_mu`` (d = 4)."""
    pi = np.asarray(pi, dtype=float)
    lam = float(np.sqrt(pi @ pi))
    if lam == 0.0:
        raise SingularPointError("eigenvector matrices undefined at p=0 (Lambda = 0)")
    s = 1.0 / np.sqrt(2.0)
    Vp = s * np.vstack([_I2, _w(pi) / lam])
    Vm = s * np.vstack([_wbar(pi) / lam, -_I2])
    return Vp, Vm


def principal_eigen(p) -> EigenPair:
    """Eigen-decomposition of the principal symbol ``gamma_mu p_mu`` in d = 4.

    Both eigenvalues ``+-|p|`` are doubly degenerate.  Passing the kinetic
    momentum ``pi = p - eA`` gives the Abelian decomposition.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (4,):
        raise ValueError("principal_eigen is defined for d = 4 momenta")
    Vp, Vm = eigenvectors(p)
    lam = float(np.sqrt(p @ p))
    return EigenPair(lam, -lam, Vp, Vm)


def _radicand_sqrt(value: float, kind) -> float:
    if value < 0:
        raise DomainError(value, kind)
    return float(np.sqrt(value))


def classical_hamiltonian(
    kind: HamiltonianKind,
    p,
    x=None,
    C=None,
    s=None,
    field=None,
    params: Couplings = Couplings(),
) -> float:
    """Value of the classical Hamiltonian ``kind`` at a phase-space point.

    ========  ===========================================================
    free      ``+-|p|``
    abelian   ``+-|p - eA|``
    wong      ``+-|p - g A^a C^a|``
    pauli     ``Lambda^+- - (e / Lambda^+-) s.(B +- E)`` (Abelian field)
    sqrt      ``+-sqrt(|p - eA|^2 - 2e s.(B +- E))`` (Abelian field)
    triple    ``+-sqrt(|p - g A^a C^a|^2 - 2g s.(B^a +- E^a) C^a)``
    ========  ===========================================================

    The field combination is ``B + E`` on the positive branch and ``B - E`` on
    the negative one; this is what the projected transport equation yields
    for ``V_-`` and it matches the two chirality blocks of the squared
    operator.  Raises :class:`DomainError` when a radicand is negative.
    """
    sgn = kind.sign
    fam = kind.family
    p = np.asarray(p, dtype=float)
    if fam == "free":
        return sgn * float(np.sqrt(p @ p))

    if fam in ("abelian", "pauli", "sqrt"):
        if not isinstance(field, AbelianField):
            raise TypeError(f"{kind.name} needs an AbelianField")
        e = params.resolve_e(field)
        pi = p - e * np.asarray(field.A(x), dtype=float)
        if fam == "abelian":
            return sgn * float(np.sqrt(pi @ pi))
        fs = field.field_strength(x)
        sF = float(np.asarray(s) @ (fs.B[0] + sgn * fs.E[0]))
        if fam == "pauli":
            lam = sgn * float(np.sqrt(pi @ pi))
            if lam == 0.0:
                raise DomainError(0.0, kind)
            return lam - e / lam * sF
        return sgn * _radicand_sqrt(pi @ pi - 2 * e * sF, kind)

    if not isinstance(field, GaugeField):
        raise TypeError(f"{kind.name} needs a GaugeField")
    g = params.resolve_g(field)
    C = np.asarray(C, dtype=float)
    pi = p - g * np.asarray(field.A(x), dtype=float) @ C
    if fam == "wong":
        return sgn * float(np.sqrt(pi @ pi))
    if fam == "triple":
        fs = field_strength(field, x)
        G = fs.B + sgn * fs.E  # (n, 3)
        sGC = float(np.asarray(s, dtype=float) @ (C @ G))
        return sgn * _radicand_sqrt(pi @ pi - 2 * g * sGC, kind)
    raise ValueError(f"unknown Hamiltonian kind {kind}")


def dirac_squared_symbol(
    p,
    x,
    field: GaugeField,
    hbar: float = 1.0,
    mode: str = "weyl-hbar",
    C=None,
    s=None,
) -> np.ndarray:
    """Weyl symbol of the squared Dirac operator.

    ``mode="weyl-hbar"`` keeps spin and colour as matrices:
    ``(p - hbar g A)^2 + (i hbar^2 g / 4) [gamma_mu, gamma_nu] F_{mu nu}``
    with ``A = A^a X^a / 2`` and ``F = F^a X^a / 2``.  Works for d = 2 and 4.

    ``mode="triple"`` maps spin and colour to classical vectors ``s``, ``C``
    and returns the diagonal 2x2 symbol with entries
    ``|p - gA^aC^a|^2 - 2g s.(B^a +- E^a) C^a`` (d = 4 only).
    """
    p = np.asarray(p, dtype=float)
    g = field.g
    fs = field_strength(field, x)
    if mode == "weyl-hbar":
        d = field.d
        gam = build_gamma(d)
        J = field.algebra.dim_rep
        kin = p[:, None, None] * np.eye(J) - hbar * g * field.matrix_potential(x)
        ns = gam.size
        out = np.kron(np.eye(ns), sum(kin[mu] @ kin[mu] for mu in range(d)))
        Fm = 0.5 * np.tensordot(fs.F, field.algebra.generators, axes=(2, 0))
        for mu in range(d):
            for nu in range(d):
                if mu == nu:
                    continue
                comm = gam.gamma[mu] @ gam.gamma[nu] - gam.gamma[nu] @ gam.gamma[mu]
                out = out + 0.25j * hbar**2 * g * np.kron(comm, Fm[mu, nu])
        return out
    if mode == "triple":
        if field.d != 4:
            raise ValueError("triple mode is defined for d = 4")
        C = np.asarray(C, dtype=float)
        s = np.asarray(s, dtype=float)
        pi = p - g * np.asarray(field.A(x), dtype=float) @ C
        EC = C @ fs.E
        BC = C @ fs.B
        return np.diag(
            [pi @ pi - 2 * g * s @ (BC + EC), pi @ pi - 2 * g * s @ (BC - EC)]
        ).astype(complex)
    raise ValueError(f"unknown mode {mode!r}")


def squared_symbol_chiral_blocks(p, x, field: GaugeField, hbar: float = 1.0) -> np.ndarray:
    """Block form ``(p - hbar g A)^2 - hbar^2 g diag(sigma.(B+E), sigma.(B-E))``.

    Written out explicitly in the chiral representation, independently of
    :func:`dirac_squared_symbol`; the two agree identically.
    """
    p = np.asarray(p, dtype=float)
    g = field.g
    X = field.algebra.generators
    J = field.algebra.dim_rep
    kin = p[:, None, None] * np.eye(J) - hbar * g * field.matrix_potential(x)
    fs = field_strength(field, x)
    Em = 0.5 * np.einsum("ai,ajk->ijk", fs.E, X)
    Bm = 0.5 * np.einsum("ai,ajk->ijk", fs.B, X)
    z = np.zeros((2, 2))
    out = np.kron(np.eye(4), sum(k @ k for k in kin))
    for i in range(3):
        up = np.block([[SIGMA[i], z], [z, z]])
        dn = np.block([[z, z], [z, SIGMA[i]]])
        out = out - hbar**2 * g * (
            np.kron(up, Bm[i] + Em[i]) + np.kron(dn, Bm[i] - Em[i])
        )
    return out


def _dV(pi, branch: int) -> np.ndarray:
    """Derivatives ``dV_branch / dpi_nu`` as an array ``(4, 4, 2)``."""
    lam = float(np.sqrt(pi @ pi))
    s = 1.0 / np.sqrt(2.0)
    dw = [1j * SIGMA[0], 1j * SIGMA[1], 1j * SIGMA[2], _I2]
    out = np.zeros((4, 4, 2), dtype=complex)
    W = _w(pi) if branch > 0 else _wbar(pi)
    for nu in range(4):
        dW = dw[nu] if branch > 0 or nu == 3 else -dw[nu]
        block = dW / lam - W * pi[nu] / lam**3
        if branch > 0:
            out[nu, 2:] = s * block
        else:
            out[nu, :2] = s * block
    return out


def appendix_a_identities(p, x, field_abelian: AbelianField, e: float | None = None, hess=None) -> dict:
    """Residuals of the projected transport identities for an Abelian field.

    The phase ``S`` is taken with ``grad S = p`` at ``x`` and Hessian ``hess``
    (default zero); time derivatives of ``pi = grad S - eA`` follow from the
    Hamilton-Jacobi equation, ``d_t pi_mu = -+ (pi_nu / Lambda) d_mu pi_nu``.

    Returned residuals (max-abs norms):

    ``proj_plus`` / ``proj_minus``
        ``V_+-^dag gamma_mu V_+- - (+-pi_mu/Lambda) 1``.
    ``spin_plus`` / ``spin_minus``
        traceless part of ``V^dag (d_t + gamma_mu d_mu) V`` against
        ``-(ie / 2 Lambda^+-) sigma.(B +- E)``.
    ``scalar_plus`` / ``scalar_minus``
        its scalar part against ``pi.d_t pi / (2 Lambda^2) +- d_mu pi_mu / (2 Lambda)``.
    """
    e = field_abelian.e if e is None else e
    p = np.asarray(p, dtype=float)
    pi = p - e * np.asarray(field_abelian.A(x), dtype=float)
    lam = float(np.sqrt(pi @ pi))
    if lam == 0.0:
        raise SingularPointError("Lambda = 0: projected transport is singular")
    hess = np.zeros((4, 4)) if hess is None else np.asarray(hess, dtype=float)
    dA = np.asarray(field_abelian.dA(x), dtype=float)
    P = hess - e * dA  # P[mu, nu] = d_mu pi_nu
    F = dA - dA.T
    E = np.array([F[3, 0], F[3, 1], F[3, 2]])
    B = np.array([F[1, 2], F[2, 0], F[0, 1]])
    gam = build_gamma(4).gamma
    Vp, Vm = eigenvectors(pi)
    out = {}
    for name, V, br in (("plus", Vp, +1), ("minus", Vm, -1)):
        proj = np.einsum("ia,mij,jb->mab", V.conj(), gam, V)
        target = br * pi[:, None, None] / lam * _I2
        out[f"proj_{name}"] = float(np.max(np.abs(proj - target)))
        out[f"norm_{name}"] = float(np.max(np.abs(V.conj().T @ V - _I2)))

        dV = _dV(pi, br)
        dt_pi = -br * (P @ pi) / lam
        dtV = np.tensordot(dt_pi, dV, axes=(0, 0))
        dmuV = np.tensordot(P, dV, axes=(1, 0))  # (mu, 4, 2)
        M = V.conj().T @ dtV + sum(V.conj().T @ gam[mu] @ dmuV[mu] for mu in range(4))
        scalar = 0.5 * np.trace(M)
        spin = M - scalar * _I2
        lam_b = br * lam
        expected = -0.5j * e / lam_b * pauli_dot(B + br * E)
        out[f"spin_{name}"] = float(np.max(np.abs(spin - expected)))
        scalar_expected = (pi @ dt_pi) / (2 * lam**2) + br * np.trace(P) / (2 * lam)
        out[f"scalar_{name}"] = float(abs(scalar - scalar_expected))
    return out
