"""Gamma matrices, su(N) generators, gauge fields and field strengths.

Conventions
-----------
Generators are Hermitean, traceless and normalised to ``tr(X^a X^b) = 2 delta_ab``.
Structure constants are stored real, with

    [X^a, X^b] = 2i f^{abc} X^c,
    {X^a, X^b} = (4/N) delta_ab + 2 d^{abc} X^c.

A gauge potential is decomposed as ``A_mu = 1/2 A_mu^a X^a``, so the matrix
field strength ``F = dA - dA - ig[A, A]`` has real components

    F_{mu nu}^a = d_mu A_nu^a - d_nu A_mu^a + g f^{abc} A_mu^b A_nu^c.

Electric and magnetic parts (d = 4, index 4 is Euclidean time) follow

    E_i = F_{4i},   B_1 = F_{23},  B_2 = F_{31},  B_3 = F_{12}.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "SIGMA",
    "GammaSet",
    "LieAlgebraRep",
    "GaugeField",
    "AbelianField",
    "FieldStrength",
    "build_gamma",
    "build_su",
    "field_strength",
    "electric_magnetic",
    "pauli_dot",
]

SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
SIGMA.flags.writeable = False

_I2 = np.eye(2, dtype=complex)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.flags.writeable = False
    return a


def pauli_dot(v) -> np.ndarray:
    """Return ``v . sigma`` for a real or complex 3-vector ``v``."""
    return np.tensordot(np.asarray(v), SIGMA, axes=(0, 0))


@dataclass(frozen=True)
class GammaSet:
    dim: int
    gamma: np.ndarray  # (dim, n, n)
    gamma5: np.ndarray | None = None

    @property
    def size(self) -> int:
        return self.gamma.shape[1]

    def slash(self, p) -> np.ndarray:
        """``gamma_mu p_mu`` for a d-vector ``p``."""
        return np.tensordot(np.asarray(p), self.gamma, axes=(0, 0))


def build_gamma(d: int) -> GammaSet:
    """Euclidean gamma matrices.

    ``d = 4`` uses the chiral representation (gamma_4 has unit off-diagonal
    blocks, gamma5 = diag(1, 1, -1, -1)); ``d = 2`` uses the Pauli matrices
    sigma_1, sigma_2.
    """
    if d == 4:
        z = np.zeros((2, 2), dtype=complex)
        gam = [np.block([[z, -1j * s], [1j * s, z]]) for s in SIGMA]
        gam.append(np.block([[z, _I2], [_I2, z]]))
        gam = np.array(gam)
        g5 = gam[0] @ gam[1] @ gam[2] @ gam[3]
        return GammaSet(4, _frozen(gam), _frozen(g5))
    if d == 2:
        return GammaSet(2, _frozen(SIGMA[:2].copy()))
    raise ValueError(f"unsupported spacetime dimension d={d}; expected 2 or 4")


def _gell_mann(n: int) -> np.ndarray:
    # standard ordering: for k = 2..n the symmetric/antisymmetric pairs (j, k),
    # j < k, followed by the (k-1)-th diagonal generator
    mats = []
    for k in range(1, n):
        for j in range(k):
            s = np.zeros((n, n), dtype=complex)
            s[j, k] = s[k, j] = 1.0
            a = np.zeros((n, n), dtype=complex)
            a[j, k] = -1j
            a[k, j] = 1j
            mats.extend([s, a])
        diag = np.zeros(n)
        diag[:k] = 1.0
        diag[k] = -k
        mats.append(np.sqrt(2.0 / (k * (k + 1))) * np.diag(diag).astype(complex))
    return np.array(mats)


@dataclass(frozen=True)
class LieAlgebraRep:
    """Fundamental representation of su(N)."""

    N: int
    generators: np.ndarray  # (N^2 - 1, N, N)
    f: np.ndarray  # (n, n, n) real, antisymmetric
    dsym: np.ndarray  # (n, n, n) real, symmetric
    casimir2: float

    @property
    def dim_rep(self) -> int:
        return self.generators.shape[1]

    @property
    def n_gen(self) -> int:
        return self.generators.shape[0]

    def matrix(self, coeffs) -> np.ndarray:
        """``coeffs^a X^a`` (no factor 1/2)."""
        return np.tensordot(np.asarray(coeffs), self.generators, axes=(0, 0))

    def quadratic_casimir(self, C) -> float:
        C = np.asarray(C)
        return float(C @ C)

    def cubic_casimir(self, C) -> float:
        C = np.asarray(C)
        return float(np.einsum("abc,a,b,c->", self.dsym, C, C, C))

    def highest_weight(self, hbar: float = 1.0) -> np.ndarray:
        """Classical colour vector ``C^a = (hbar/2) e1^dag X^a e1``.

        This is the reference point of the coadjoint orbit through the highest
        weight of the fundamental representation.
        """
        return 0.5 * hbar * self.generators[:, 0, 0].real.copy()

    def colour_vector(self, u, hbar: float = 1.0) -> np.ndarray:
        """Expectation values ``(hbar/2) u^dag X^a u`` for a unit vector ``u``."""
        u = np.asarray(u)
        return 0.5 * hbar * np.einsum("i,aij,j->a", u.conj(), self.generators, u).real


def build_su(N: int) -> LieAlgebraRep:
    """Generators of su(N) in the fundamental representation.

    N = 2 gives the Pauli matrices, N = 3 the Gell-Mann matrices in the
    standard order; larger N use the generalised Gell-Mann basis.
    """
    if not isinstance(N, (int, np.integer)) or N < 2:
        raise ValueError(f"unsupported group SU({N}); need integer N >= 2")
    X = _gell_mann(int(N))
    comm = np.einsum("aij,bjk->abik", X, X) - np.einsum("bij,ajk->abik", X, X)
    anti = np.einsum("aij,bjk->abik", X, X) + np.einsum("bij,ajk->abik", X, X)
    f = np.einsum("abij,cji->abc", comm, X) / 4j
    d = np.einsum("abij,cji->abc", anti, X) / 4.0
    casimir = float(np.trace(np.einsum("aij,ajk->ik", X, X)).real / N)
    return LieAlgebraRep(
        N=int(N),
        generators=_frozen(X),
        f=_frozen(f.real),
        dsym=_frozen(d.real),
        casimir2=casimir,
    )


@dataclass(frozen=True)
class FieldStrength:
    """Components ``F[mu, nu, a]`` plus E/B split (d = 4 only).

    For an Abelian field the colour axis has length one.
    """

    F: np.ndarray
    E: np.ndarray | None = None  # (n, 3)
    B: np.ndarray | None = None  # (n, 3)


def electric_magnetic(F: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split ``F[mu, nu, a]`` (d = 4) into ``E[a, i]`` and ``B[a, i]``."""
    E = np.stack([F[3, 0], F[3, 1], F[3, 2]], axis=-1)
    B = np.stack([F[1, 2], F[2, 0], F[0, 1]], axis=-1)
    return E, B


@dataclass(frozen=True)
class GaugeField:
    """Non-Abelian potential ``A_mu^a(x)`` with analytic first derivatives.

    ``A(x)`` returns an array of shape ``(d, n_gen)`` and ``dA(x)`` one of
    shape ``(d, d, n_gen)`` with ``dA[nu, mu, a] = d_nu A_mu^a``.
    """

    algebra: LieAlgebraRep
    A: Callable[[np.ndarray], np.ndarray]
    dA: Callable[[np.ndarray], np.ndarray]
    d: int = 4
    g: float = 1.0
    kind: str = "user-supplied-analytic"
    constant_value: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def constant(cls, algebra: LieAlgebraRep, A, g: float = 1.0) -> "GaugeField":
        A = _frozen(np.asarray(A, dtype=float))
        d, n = A.shape
        if n != algebra.n_gen:
            raise ValueError(f"potential has {n} colour components, algebra has {algebra.n_gen}")
        zero = _frozen(np.zeros((d, d, n)))
        return cls(algebra, lambda x: A, lambda x: zero, d=d, g=g, kind="constant", constant_value=A)

    @classmethod
    def linear(cls, algebra: LieAlgebraRep, A0, M, g: float = 1.0) -> "GaugeField":
        """``A_mu^a(x) = A0[mu, a] + x_nu M[nu, mu, a]``."""
        A0 = _frozen(np.asarray(A0, dtype=float))
        M = _frozen(np.asarray(M, dtype=float))
        d = A0.shape[0]
        return cls(
            algebra,
            lambda x: A0 + np.tensordot(np.asarray(x, dtype=float), M, axes=(0, 0)),
            lambda x: M,
            d=d,
            g=g,
        )

    @classmethod
    def zero(cls, algebra: LieAlgebraRep, d: int = 4, g: float = 1.0) -> "GaugeField":
        return cls.constant(algebra, np.zeros((d, algebra.n_gen)), g=g)

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant"

    def matrix_potential(self, x) -> np.ndarray:
        """``A_mu = 1/2 A_mu^a X^a`` as an array ``(d, J, J)``."""
        return 0.5 * np.tensordot(self.A(x), self.algebra.generators, axes=(1, 0))


@dataclass(frozen=True)
class AbelianField:
    """U(1) potential ``A_mu(x)`` with charge ``e``; ``dA[nu, mu] = d_nu A_mu``."""

    A: Callable[[np.ndarray], np.ndarray]
    dA: Callable[[np.ndarray], np.ndarray]
    e: float = 1.0
    d: int = 4

    @classmethod
    def linear(cls, A0, M, e: float = 1.0) -> "AbelianField":
        A0 = _frozen(np.asarray(A0, dtype=float))
        M = _frozen(np.asarray(M, dtype=float))
        return cls(
            lambda x: A0 + np.asarray(x, dtype=float) @ M,
            lambda x: M,
            e=e,
            d=A0.shape[0],
        )

    @classmethod
    def constant(cls, A0, e: float = 1.0) -> "AbelianField":
        A0 = np.asarray(A0, dtype=float)
        return cls.linear(A0, np.zeros((A0.size, A0.size)), e=e)

    def field_strength(self, x) -> FieldStrength:
        dA = np.asarray(self.dA(x))
        F = (dA - dA.T)[:, :, None]
        if self.d == 4:
            E, B = electric_magnetic(F)
            return FieldStrength(_frozen(F), _frozen(E), _frozen(B))
        return FieldStrength(_frozen(F))


def field_strength(field: GaugeField, x) -> FieldStrength:
    """Field strength components of ``field`` at ``x``.

    Derivatives come from ``field.dA``; nothing is differenced numerically.
    """
    A = np.asarray(field.A(x), dtype=float)
    dA = np.asarray(field.dA(x), dtype=float)
    comm = field.g * np.einsum("abc,mb,nc->mna", field.algebra.f, A, A)
    # explicit antisymmetrisation keeps F_{mu nu} = -F_{nu mu} bit-exact
    F = (dA - dA.transpose(1, 0, 2)) + 0.5 * (comm - comm.transpose(1, 0, 2))
    if field.d == 4:
        E, B = electric_magnetic(F)
        return FieldStrength(_frozen(F), _frozen(E), _frozen(B))
    return FieldStrength(_frozen(F))
