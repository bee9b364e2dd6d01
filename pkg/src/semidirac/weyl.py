"""Mean spectral densities (Weyl terms) in the three semiclassical limits.

Free limit (hbar -> 0): spin and colour only contribute multiplicities.
Colour limit (hbar -> 0, J -> oo): a constant field is removed by shifting p.
Triple limit (hbar -> 0, J, s -> oo): averaging over Gaussian random E, B
fields of variance sigma^2 gives

    rho(lambda) = 4 pi^{d/2} V J (2s+1) / ((2 pi hbar)^d Gamma(d/2)) * lambda * Phi_d(lambda),
    Phi_d(lambda) = (2 pi v^2)^{-1/2} int_0^oo exp(-(p^2 - lambda^2)^2 / 2v^2) p^{d-1} dp,

with v = sqrt(8) sigma g |s| |C|.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .algebra import GaugeField, build_su
from .rng import MCEstimate, blocked_mean, haar_unit_vectors, sphere_points

__all__ = [
    "WeylConfig",
    "StochasticFieldModel",
    "ChiralCurvePoint",
    "QuadratureError",
    "mean_density_free",
    "mean_density_colour_limit",
    "phi_d",
    "phi_4_closed",
    "phi_d_at_zero",
    "mean_density_triple",
    "triple_small_lambda",
    "field_strength_scale",
    "gaussian_phase_average",
    "mc_phase_average",
    "mc_density_triple",
    "mc_density_triple_lattice",
    "chiral_curve",
    "scaled_variance",
    "scaled_density",
]


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class WeylConfig:
    """Parameters of the Weyl terms.

    ``c2_spin`` and ``c2_colour`` override the classical values of ``|s|^2``
    and ``C^aC^a``.  Otherwise ``c2_mode="orbit"`` uses the highest-weight
    coadjoint orbit (``(hbar s)^2`` and ``hbar^2 (N-1)/(2N)``) and
    ``c2_mode="quantum"`` the Casimir values (``hbar^2 s(s+1)`` and
    ``hbar^2 (N^2-1)/(2N)``).
    """

    d: int = 4
    V: float = 1.0
    J: int = 3
    s: float = 0.5
    hbar: float = 1.0
    g: float = 1.0
    N: int = 3
    c2_spin: float | None = None
    c2_colour: float | None = None
    c2_mode: str = "orbit"

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("dimension d must be >= 2")
        for name in ("V", "hbar", "J", "N"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.s < 0:
            raise ValueError("spin quantum number must be >= 0")
        if self.c2_mode not in ("orbit", "quantum"):
            raise ValueError(f"c2_mode must be 'orbit' or 'quantum', got {self.c2_mode!r}")

    @property
    def multiplicity(self) -> float:
        return self.J * (2 * self.s + 1)

    @property
    def spin_norm2(self) -> float:
        if self.c2_spin is not None:
            return float(self.c2_spin)
        if self.c2_mode == "quantum":
            return self.hbar**2 * self.s * (self.s + 1)
        return (self.hbar * self.s) ** 2

    @property
    def colour_norm2(self) -> float:
        if self.c2_colour is not None:
            return float(self.c2_colour)
        N = self.N
        if self.c2_mode == "quantum":
            return self.hbar**2 * (N * N - 1) / (2 * N)
        return self.hbar**2 * (N - 1) / (2 * N)

    def prefactor(self) -> float:
        """``V J (2s+1) / (2 pi hbar)^d``."""
        return self.V * self.multiplicity / (2 * math.pi * self.hbar) ** self.d

    def sphere_area(self) -> float:
        """Area of the unit sphere ``S^{d-1}``."""
        return 2 * math.pi ** (self.d / 2) / math.gamma(self.d / 2)


@dataclass(frozen=True)
class StochasticFieldModel:
    sigma: float
    seed: int = 0
    samples: int = 100_000

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")


@dataclass(frozen=True)
class ChiralCurvePoint:
    zeta: float
    r: float


def mean_density_free(lam, cfg: WeylConfig = WeylConfig()):
    """``2 pi^{d/2} J (2s+1) V lambda^{d-1} / ((2 pi hbar)^d Gamma(d/2))``."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        raise ValueError("lambda must be >= 0")
    out = cfg.prefactor() * cfg.sphere_area() * lam ** (cfg.d - 1)
    return float(out) if out.ndim == 0 else out


def _orbit_colour(rng, n, alg, hbar, norm2):
    u = haar_unit_vectors(rng, n, alg.dim_rep)
    C = 0.5 * hbar * np.einsum("ni,aij,nj->na", u.conj(), alg.generators, u).real
    if norm2 is not None:
        C *= np.sqrt(norm2 / np.einsum("na,na->n", C, C))[:, None]
    return C


def mean_density_colour_limit(
    lam: float,
    cfg: WeylConfig,
    field: GaugeField,
    mc_samples: int = 100_000,
    seed: int = 0,
    workers: int = 1,
) -> MCEstimate:
    """Monte Carlo Weyl term of the Wong Hamiltonian in a constant field.

    The colour vector is drawn uniformly from its orbit and the momentum
    shell ``|p - b| = lambda`` (``b_mu = g A_mu^a C^a``) is integrated in
    spherical coordinates about ``p = 0``: along a direction ``w`` the roots
    ``r = w.b +- sqrt((w.b)^2 - |b|^2 + lambda^2)`` each contribute
    ``r^{d-1} lambda / sqrt(...)``.  The estimator has finite variance when
    ``|b| < lambda`` for all orbit points.  The exact answer is the free
    density for every field.
    """
    if mc_samples < 1:
        raise ValueError("need at least one sample")
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if not field.is_constant:
        raise ValueError("the colour-limit shift argument needs a constant field")
    if field.d != cfg.d:
        raise ValueError("field and config dimensions differ")
    alg = field.algebra
    A = np.asarray(field.constant_value, dtype=float)
    g = field.g
    d = cfg.d
    scale = cfg.prefactor() * cfg.sphere_area()
    c2 = cfg.c2_colour

    if not np.any(A):
        return MCEstimate(mean_density_free(lam, cfg), 0.0, mc_samples)

    def sampler(rng, n):
        C = _orbit_colour(rng, n, alg, cfg.hbar, c2)
        b = g * C @ A.T  # (n, d)
        w = sphere_points(rng, n, d)
        wb = np.einsum("ni,ni->n", w, b)
        D = wb * wb - np.einsum("ni,ni->n", b, b) + lam * lam
        ok = D > 0
        sq = np.sqrt(np.where(ok, D, 1.0))
        total = np.zeros(n)
        for sgn in (+1.0, -1.0):
            r = wb + sgn * sq
            use = ok & (r > 0)
            total += np.where(use, np.abs(r) ** (d - 1) * lam / sq, 0.0)
        return scale * total

    return blocked_mean(sampler, mc_samples, seed, workers)


def _phi_integrand(p, lam, v, d):
    return math.exp(-((p * p - lam * lam) ** 2) / (2 * v * v)) * p ** (d - 1)


def phi_d(lam: float, v: float, d: int = 4, epsrel: float = 1e-13, limit: int = 200) -> float:
    """``Phi_d(lambda)`` by adaptive Gauss-Kronrod quadrature.

    The range ``[0, lambda + 10 sqrt(v) + 10]`` is split at the peak
    ``p = lambda`` and at ``p^2 = lambda^2 +- k v`` so that narrow peaks
    (``v << lambda^2``) are resolved.
    """
    if v <= 0:
        raise ValueError("phi_d needs v > 0; use the free limit for v = 0")
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    upper = lam + 10 * math.sqrt(v) + 10
    pts = {lam}
    for k in (1.0, 3.0, 8.0):
        lo = lam * lam - k * v
        if lo > 0:
            pts.add(math.sqrt(lo))
        pts.add(math.sqrt(lam * lam + k * v))
    edges = [0.0] + sorted(p for p in pts if 0 < p < upper) + [upper]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, err = integrate.quad(
            _phi_integrand, a, b, args=(lam, v, d), epsabs=0.0, epsrel=epsrel, limit=limit
        )
        if not np.isfinite(val) or err > max(1e-9 * abs(val), 1e-300):
            raise QuadratureError(f"quadrature did not converge on [{a}, {b}] (err {err:.3g})")
        total += val
    return total / math.sqrt(2 * math.pi * v * v)


def phi_4_closed(lam: float, v: float) -> float:
    """Closed form of ``Phi_4``."""
    if v <= 0:
        raise ValueError("v must be positive")
    s2v = math.sqrt(2 * v * v)
    l2 = lam * lam
    return s2v / (4 * math.sqrt(math.pi)) * math.exp(-l2 * l2 / (2 * v * v)) + 0.25 * l2 * (
        1 + math.erf(l2 / s2v)
    )


def phi_d_at_zero(v: float, d: int = 4) -> float:
    """``Phi_d(0) = (2v^2)^{d/4 - 1/2} Gamma(d/4) / (4 sqrt(pi))``."""
    return (2 * v * v) ** (d / 4 - 0.5) * math.gamma(d / 4) / (4 * math.sqrt(math.pi))


def field_strength_scale(sigma: float, cfg: WeylConfig) -> float:
    """``v = sqrt(8) sigma g |s| |C|``."""
    return math.sqrt(8) * sigma * cfg.g * math.sqrt(cfg.spin_norm2 * cfg.colour_norm2)


def mean_density_triple(lam: float, v: float | None = None, cfg: WeylConfig = WeylConfig(), sigma: float | None = None) -> float:
    """Gaussian-averaged Weyl term of the combined-limit Hamiltonian.

    Give either ``v`` or the field standard deviation ``sigma``.  ``v = 0``
    returns the free density exactly; d = 4 uses the closed form of Phi_4.
    """
    if (v is None) == (sigma is None):
        raise ValueError("give exactly one of v and sigma")
    if v is None:
        v = field_strength_scale(sigma, cfg)
    if lam < 0 or v < 0:
        raise ValueError("lambda and v must be >= 0")
    if v == 0:
        return mean_density_free(lam, cfg)
    phi = phi_4_closed(lam, v) if cfg.d == 4 else phi_d(lam, v, cfg.d)
    return 2 * cfg.prefactor() * cfg.sphere_area() * lam * phi


def triple_small_lambda(lam: float, v: float, cfg: WeylConfig = WeylConfig()) -> float:
    """Leading small-lambda form, keeping only the Gaussian term of Phi_d(0)."""
    phi0 = phi_d_at_zero(v, cfg.d)
    return 2 * cfg.prefactor() * cfg.sphere_area() * lam * phi0 * math.exp(-(lam**4) / (2 * v * v))


def gaussian_phase_average(s_vec, C_vec, g: float, sigma: float, t: float) -> float:
    """``exp(-4 sigma^2 g^2 |s|^2 C^aC^a t^2)``."""
    s2 = float(np.dot(s_vec, s_vec))
    c2 = float(np.dot(C_vec, C_vec))
    return math.exp(-4 * sigma**2 * g**2 * s2 * c2 * t**2)


def mc_phase_average(s_vec, C_vec, g: float, sigma: float, t: float, samples: int = 1_000_000, seed: int = 0) -> MCEstimate:
    """Sample ``cos(2g t s.(E^a + B^a) C^a)`` over Gaussian fields.

    The sine part averages to zero by symmetry and is not estimated.
    """
    s_vec = np.asarray(s_vec, dtype=float)
    C_vec = np.asarray(C_vec, dtype=float)
    n_col = C_vec.size
    SC = np.outer(C_vec, s_vec).ravel()

    def sampler(rng, n):
        EB = rng.standard_normal((n, 2, n_col * 3)) * sigma
        w = 2 * g * ((EB[:, 0] + EB[:, 1]) @ SC)
        return np.cos(w * t)

    return blocked_mean(sampler, samples, seed)


def _triple_weights(lam, d, u):
    # Phi_d estimator: u^{(d-2)/2} Theta(u) / 2
    pos = u > 0
    return 0.5 * np.where(pos, np.abs(u) ** ((d - 2) / 2), 0.0)


@lru_cache(maxsize=8)
def _algebra(N):
    return build_su(N)


def _triple_sampler(lam, sigma, cfg: WeylConfig, sites: int):
    alg = _algebra(cfg.N)
    n_col = alg.n_gen
    s_norm = math.sqrt(cfg.spin_norm2)
    scale = 2 * cfg.prefactor() * cfg.sphere_area() * lam
    d = cfg.d
    g = cfg.g

    def sampler(rng, n):
        s = s_norm * sphere_points(rng, n, 3)
        C = _orbit_colour(rng, n, alg, cfg.hbar, cfg.colour_norm2)
        SC = np.einsum("ni,na->nai", s, C).reshape(n, 1, n_col * 3)
        acc = np.zeros(n)
        for _ in range(sites):
            E = rng.standard_normal((n, n_col * 3))
            B = rng.standard_normal((n, n_col * 3))
            w = 2 * g * sigma * np.einsum("nk,nk->n", SC[:, 0], E + B)
            acc += _triple_weights(lam, d, lam * lam + w)
        return scale * acc / sites

    return sampler


def mc_density_triple(
    lam: float,
    sigma: float,
    cfg: WeylConfig = WeylConfig(),
    samples: int = 1_000_000,
    seed: int = 0,
    workers: int = 1,
) -> MCEstimate:
    """Monte Carlo estimate of the Gaussian-averaged triple-limit density.

    Each sample draws a spin direction, a colour vector on its orbit and
    constant fields ``E^a, B^a`` with i.i.d. ``N(0, sigma^2)`` components;
    then ``u = lambda^2 + 2g s.(E^a + B^a) C^a`` and the estimator of
    ``Phi_d`` is ``u^{(d-2)/2} Theta(u) / 2``.
    """
    if samples < 100:
        raise ValueError("need at least 100 samples")
    if sigma == 0:
        return MCEstimate(mean_density_free(lam, cfg), 0.0, samples)
    return blocked_mean(_triple_sampler(lam, sigma, cfg, 1), samples, seed, workers)


def mc_density_triple_lattice(
    lam: float,
    sigma: float,
    cfg: WeylConfig = WeylConfig(),
    sites: int = 4,
    samples: int = 100_000,
    seed: int = 0,
    workers: int = 1,
) -> MCEstimate:
    """Local Gaussian fields on ``sites`` equal cells of the volume.

    Every cell carries its own independent constant field; the Weyl term is
    the volume average of the cell densities.  Its expectation equals the
    constant-random-field average.
    """
    if sites < 1:
        raise ValueError("need at least one lattice site")
    if samples < 100:
        raise ValueError("need at least 100 samples")
    if sigma == 0:
        return MCEstimate(mean_density_free(lam, cfg), 0.0, samples)
    return blocked_mean(_triple_sampler(lam, sigma, cfg, sites), samples, seed, workers)


def chiral_curve(zeta_grid) -> list[ChiralCurvePoint]:
    """Scaled density ``r(zeta) = zeta exp(-1 / (2 zeta^2))``."""
    out = []
    for z in np.asarray(zeta_grid, dtype=float).ravel():
        if not z > 0:
            raise ValueError("zeta grid points must be positive")
        out.append(ChiralCurvePoint(float(z), float(z * math.exp(-0.5 / (z * z)))))
    return out


def scaled_variance(v: float, L4: float) -> float:
    """``zeta = v L_4^2 / (2 pi)^2``."""
    return v * L4 * L4 / (2 * math.pi) ** 2


def scaled_density(rho: float, V: float, L4: float) -> float:
    """``r = L_4^3 rho / (3 V sqrt(2 pi))``."""
    return L4**3 * rho / (3 * V * math.sqrt(2 * math.pi))
