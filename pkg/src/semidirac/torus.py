"""Dirac operator in constant SU(2) fields on the two-torus.

Periodic boundary conditions quantise ``p_mu = 2 pi hbar n_mu / L_mu``.  For
constant potentials ``A_1, A_2`` (3-vectors in colour space) the positive
eigenvalues at each lattice momentum are

    lambda_+-^2 = p^2 + hbar^2 g^2 |A|^2/4 +- sqrt(hbar^2 g^2 |p_mu A_mu|^2 + hbar^4 g^4 |A_1 x A_2|^2/4).

In the special configuration ``A_1 = A e_1``, ``A_2 = A e_2`` this reduces to
``lambda_+- = sqrt(p^2 + a^2/4) +- a/2`` with ``a = hbar g A``, and Poisson
summation gives an exact Bessel-function trace formula.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import j0

from .algebra import GaugeField, build_su
from .symbols import dirac_symbol

__all__ = [
    "TorusConfig",
    "SpectrumTable",
    "CompareTable",
    "TruncationWarning",
    "TruncationError",
    "exact_eigenvalues",
    "special_eigenvalue",
    "closed_form_eigenvalues",
    "brute_force_eigenvalues",
    "exact_mean_density",
    "mean_counting",
    "counting_function",
    "orbit_lengths",
    "orbit_weight",
    "orbit_sum_exact",
    "orbit_sum_semiclassical",
    "smoothed_compare",
]


class TruncationWarning(UserWarning):
    pass


class TruncationError(RuntimeError):
    pass


@dataclass(frozen=True)
class TorusConfig:
    """Torus geometry and constant SU(2) potentials.

    ``mode="special"`` sets ``A1 = (A, 0, 0)`` and ``A2 = (0, A, 0)``;
    ``mode="general"`` takes ``A1`` and ``A2`` as given.
    """

    L1: float = 2 * math.pi
    L2: float = 2 * math.pi
    hbar: float = 1.0
    g: float = 1.0
    A: float = 1.0
    A1: tuple | None = None
    A2: tuple | None = None
    mode: str = "special"

    def __post_init__(self):
        if not (self.L1 > 0 and self.L2 > 0):
            raise ValueError("box lengths must be positive")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")
        if self.mode not in ("special", "general"):
            raise ValueError(f"unknown torus mode {self.mode!r}")
        if self.mode == "general" and (self.A1 is None or self.A2 is None):
            raise ValueError("general mode needs A1 and A2")

    @property
    def potentials(self) -> np.ndarray:
        """``A[mu, a]`` with shape (2, 3)."""
        if self.mode == "special":
            return np.array([[self.A, 0.0, 0.0], [0.0, self.A, 0.0]])
        return np.array([self.A1, self.A2], dtype=float)

    @property
    def a(self) -> float:
        """``a = hbar g A`` (special mode)."""
        if self.mode != "special":
            raise ValueError("the abbreviation a = hbar g A needs the special field mode")
        return self.hbar * self.g * self.A

    @property
    def area(self) -> float:
        return self.L1 * self.L2

    def gauge_field(self) -> GaugeField:
        return GaugeField.constant(build_su(2), self.potentials, g=self.g)

    def momenta(self, n1, n2) -> np.ndarray:
        n1 = np.asarray(n1, dtype=float)
        n2 = np.asarray(n2, dtype=float)
        return np.stack(
            [2 * math.pi * self.hbar * n1 / self.L1, 2 * math.pi * self.hbar * n2 / self.L2], axis=-1
        )


def closed_form_eigenvalues(p, cfg: TorusConfig) -> tuple[np.ndarray, np.ndarray]:
    """``(lambda_+, lambda_-)`` for momenta ``p`` of shape (..., 2).

    ``lambda_-`` is evaluated as ``|z - alpha w| / lambda_+`` with
    ``z = (p1 + i p2)^2``, ``w = |A1|^2 - |A2|^2 + 2i A1.A2`` and
    ``alpha = hbar^2 g^2 / 4``, which equals ``lambda_+ lambda_-`` and avoids
    cancellation near zero modes.
    """
    p = np.asarray(p, dtype=float)
    A = cfg.potentials
    hg2 = (cfg.hbar * cfg.g) ** 2
    alpha = hg2 / 4
    P = p @ A  # (..., 3)
    cr = np.cross(A[0], A[1])
    X = np.einsum("...i,...i->...", p, p) + alpha * float((A * A).sum())
    Y = hg2 * np.einsum("...i,...i->...", P, P) + hg2 * hg2 * float(cr @ cr) / 4
    lp = np.sqrt(X + np.sqrt(Y))
    z = (p[..., 0] + 1j * p[..., 1]) ** 2
    w = A[0] @ A[0] - A[1] @ A[1] + 2j * (A[0] @ A[1])
    num = np.abs(z - alpha * w)
    lm = np.divide(num, lp, out=np.zeros_like(lp), where=lp > 0)
    return lp, lm


def special_eigenvalue(n1, n2, branch: int, cfg: TorusConfig) -> float:
    """``sqrt(p^2 + a^2/4) +- a/2`` in the special field mode."""
    if cfg.mode != "special":
        raise ValueError("special_eigenvalue needs the special field mode")
    p1, p2 = cfg.momenta(n1, n2)
    a = cfg.a
    h = math.hypot(math.hypot(p1, p2), a / 2)
    if branch > 0:
        return h + a / 2
    p2sum = p1 * p1 + p2 * p2
    # h - a/2 written without cancellation; exactly 0 at p = 0
    return p2sum / (h + a / 2) if h + a / 2 > 0 else 0.0


def brute_force_eigenvalues(p, cfg: TorusConfig) -> np.ndarray:
    """All four eigenvalues of the Dirac symbol, sorted, for momenta ``(n, 2)``.

    The matrices are assembled from :func:`semidirac.symbols.dirac_symbol`
    (affine in p) and diagonalised with LAPACK.
    """
    fld = cfg.gauge_field()
    x0 = np.zeros(2)
    K0 = dirac_symbol(np.zeros(2), x0, fld, cfg.hbar)
    K1 = dirac_symbol(np.array([1.0, 0.0]), x0, fld, cfg.hbar) - K0
    K2 = dirac_symbol(np.array([0.0, 1.0]), x0, fld, cfg.hbar) - K0
    p = np.atleast_2d(np.asarray(p, dtype=float))
    D = K0 + p[:, 0, None, None] * K1 + p[:, 1, None, None] * K2
    return np.linalg.eigvalsh(D)


@dataclass
class SpectrumTable:
    """Non-negative eigenvalues with quantum numbers, sorted by lambda.

    Each lattice momentum ``(n1, n2)`` contributes both branches; the
    operator spectrum is the table together with its mirror image.
    """

    n1: np.ndarray
    n2: np.ndarray
    branch: np.ndarray
    lam: np.ndarray
    residual: np.ndarray
    degenerate: np.ndarray

    def __len__(self):
        return len(self.lam)

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residual)) if len(self.residual) else 0.0

    def counting(self, lam) -> np.ndarray:
        """``N(lambda)``: number of table entries with ``lambda_n <= lambda``."""
        return np.searchsorted(self.lam, np.asarray(lam, dtype=float), side="right")

    def rows(self):
        for i in range(len(self)):
            yield (
                int(self.n1[i]),
                int(self.n2[i]),
                int(self.branch[i]),
                float(self.lam[i]),
                float(self.residual[i]),
                int(self.degenerate[i]),
            )

    header = ("n1", "n2", "branch", "lambda", "oracle_residual", "degenerate")

    def to_csv(self, path_or_file) -> None:
        own = isinstance(path_or_file, str) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.header)
            for r in self.rows():
                w.writerow([r[0], r[1], r[2], f"{r[3]:.17g}", f"{r[4]:.3e}", r[5]])
        finally:
            if own:
                fh.close()


def exact_eigenvalues(cfg: TorusConfig, nmax: int, verify: bool = True, degenerate_tol: float = 1e-12) -> SpectrumTable:
    """Spectrum for all ``|n_mu| <= nmax``, checked against diagonalisation.

    ``residual`` is the largest deviation between the closed form and the
    brute-force eigenvalues at that lattice momentum (0 if ``verify`` is off).
    """
    if nmax < 0:
        raise ValueError("nmax must be >= 0")
    rng = np.arange(-nmax, nmax + 1)
    N1, N2 = np.meshgrid(rng, rng, indexing="ij")
    N1 = N1.ravel()
    N2 = N2.ravel()
    p = cfg.momenta(N1, N2)
    lp, lm = closed_form_eigenvalues(p, cfg)
    if cfg.mode == "special":
        lm = np.array([special_eigenvalue(a, b, -1, cfg) for a, b in zip(N1, N2)])
        lp = np.array([special_eigenvalue(a, b, +1, cfg) for a, b in zip(N1, N2)])
    if verify:
        ev = brute_force_eigenvalues(p, cfg)
        expect = np.stack([-lp, -lm, lm, lp], axis=1)
        res = np.max(np.abs(ev - expect), axis=1)
    else:
        res = np.zeros_like(lp)
    degen = np.abs(lp - lm) < degenerate_tol
    n1 = np.concatenate([N1, N1])
    n2 = np.concatenate([N2, N2])
    br = np.concatenate([np.ones_like(N1), -np.ones_like(N1)])
    lam = np.concatenate([lp, lm])
    order = np.lexsort((br, n2, n1, lam))
    return SpectrumTable(
        n1=n1[order],
        n2=n2[order],
        branch=br[order],
        lam=lam[order],
        residual=np.concatenate([res, res])[order],
        degenerate=np.concatenate([degen, degen])[order].astype(int),
    )


def _require_special(cfg):
    if cfg.mode != "special":
        raise ValueError("this trace-formula quantity is defined for the special field mode")


def _theta(x):
    return np.heaviside(x, 1.0)


def exact_mean_density(lam, cfg: TorusConfig):
    """``(L1 L2 / 2 pi hbar^2) [Theta(lambda - a)(lambda - a/2) + (lambda + a/2)]``."""
    _require_special(cfg)
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        raise ValueError("lambda must be >= 0")
    a = cfg.a
    out = cfg.area / (2 * math.pi * cfg.hbar**2) * (_theta(lam - a) * (lam - a / 2) + lam + a / 2)
    return float(out) if out.ndim == 0 else out


def mean_counting(lam, cfg: TorusConfig):
    """Integral of the mean density from 0 to ``lambda``."""
    _require_special(cfg)
    lam = np.asarray(lam, dtype=float)
    a = cfg.a
    out = cfg.area / (4 * math.pi * cfg.hbar**2) * (
        _theta(lam - a) * lam * (lam - a) + lam * (lam + a)
    )
    return float(out) if out.ndim == 0 else out


def counting_function(cfg: TorusConfig, lam_grid, nmax: int | None = None):
    """Exact ``N(lambda)`` and its Weyl approximation on ``lam_grid``.

    ``nmax`` defaults to the smallest lattice that contains every eigenvalue
    below ``max(lam_grid)``.
    """
    lam_grid = np.asarray(lam_grid, dtype=float)
    if nmax is None:
        pmax = float(lam_grid.max()) + 1.0
        nmax = int(math.ceil(pmax * max(cfg.L1, cfg.L2) / (2 * math.pi * cfg.hbar))) + 1
    table = exact_eigenvalues(cfg, nmax, verify=False)
    return table.counting(lam_grid), mean_counting(lam_grid, cfg)


def orbit_lengths(cfg: TorusConfig, kmax: int) -> tuple[np.ndarray, np.ndarray]:
    """Distinct lengths ``q = sqrt(k1^2 L1^2 + k2^2 L2^2)`` with multiplicities.

    Winding numbers run over ``0 < max |k_mu| <= kmax``.  Lengths are grouped
    after rounding to 12 significant digits.
    """
    if kmax < 0:
        raise ValueError("kmax must be >= 0")
    if kmax == 0:
        return np.zeros(0), np.zeros(0, dtype=int)
    k = np.arange(-kmax, kmax + 1)
    K1, K2 = np.meshgrid(k, k, indexing="ij")
    mask = (K1 != 0) | (K2 != 0)
    q = np.sqrt((K1[mask] * cfg.L1) ** 2 + (K2[mask] * cfg.L2) ** 2)
    key = np.round(q, 12 - int(math.floor(math.log10(q.max()))))
    uniq, inv, counts = np.unique(key, return_inverse=True, return_counts=True)
    qs = np.zeros(len(uniq))
    np.add.at(qs, inv, q)
    return qs / counts, counts


def orbit_weight(q, cfg: TorusConfig):
    """Colour weight ``cos(q g A / 2)``; half the holonomy character."""
    _require_special(cfg)
    return np.cos(np.asarray(q) * cfg.g * cfg.A / 2)


def orbit_sum_exact(lam, cfg: TorusConfig, kmax: int):
    """Oscillating part of the exact trace formula (Bessel orbit sum)."""
    _require_special(cfg)
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if np.any(lam <= 0):
        raise ValueError("lambda must be positive")
    a = cfg.a
    hb = cfg.hbar
    q, mult = orbit_lengths(cfg, kmax)
    pref = cfg.area / (2 * math.pi * hb**2)
    lam_ = lam[:, None]
    up = np.sqrt(np.clip(lam_ * (lam_ - a), 0.0, None))
    dn = np.sqrt(lam_ * (lam_ + a))
    terms = _theta(lam_ - a) * (lam_ - a / 2) * j0(q * up / hb) + (lam_ + a / 2) * j0(q * dn / hb)
    out = pref * (terms @ mult)
    return float(out[0]) if out.size == 1 else out


def orbit_sum_semiclassical(lam, cfg: TorusConfig, kmax: int):
    """Leading-order periodic-orbit sum.

    ``(L1 L2 / (pi hbar)^{3/2}) sum_k sqrt(2 lambda / q) cos(q g A/2) cos(q lambda / hbar - pi/4)``.
    """
    _require_special(cfg)
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if np.any(lam <= 0):
        raise ValueError("lambda must be positive")
    q, mult = orbit_lengths(cfg, kmax)
    hb = cfg.hbar
    lam_ = lam[:, None]
    terms = np.sqrt(2 * lam_ / q) * orbit_weight(q, cfg) * np.cos(q * lam_ / hb - math.pi / 4)
    out = cfg.area / (math.pi * hb) ** 1.5 * (terms @ mult)
    return float(out[0]) if out.size == 1 else out


@dataclass
class CompareTable:
    lam: np.ndarray
    exact_smoothed: np.ndarray
    weyl: np.ndarray
    weyl_plus_orbits: np.ndarray
    diagnostics: dict

    header = ("lambda", "exact_smoothed", "weyl", "weyl_plus_orbits")

    @property
    def rel_dev(self) -> np.ndarray:
        return np.abs(self.weyl_plus_orbits - self.exact_smoothed) / np.abs(self.exact_smoothed)

    @property
    def max_rel_dev(self) -> float:
        return float(np.max(self.rel_dev))

    def rows(self):
        for i in range(len(self.lam)):
            yield (
                float(self.lam[i]),
                float(self.exact_smoothed[i]),
                float(self.weyl[i]),
                float(self.weyl_plus_orbits[i]),
            )


def _gauss(x, w):
    return np.exp(-0.5 * (x / w) ** 2) / (w * math.sqrt(2 * math.pi))


def _gl_nodes(lo, hi, panel, order=20):
    n_pan = max(1, int(math.ceil((hi - lo) / panel)))
    edges = np.linspace(lo, hi, n_pan + 1)
    x, w = np.polynomial.legendre.leggauss(order)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _truncation_checks(cfg, lam_grid, width, nmax, kmax):
    """Tail diagnostics; returns a list of messages (empty if fine)."""
    msgs = []
    top = float(np.max(lam_grid)) + 8 * width
    ring = np.arange(-(nmax + 1), nmax + 2)
    edge = np.concatenate(
        [
            np.stack([np.full_like(ring, nmax + 1), ring], 1),
            np.stack([np.full_like(ring, -(nmax + 1)), ring], 1),
            np.stack([ring, np.full_like(ring, nmax + 1)], 1),
            np.stack([ring, np.full_like(ring, -(nmax + 1))], 1),
        ]
    )
    _, lm = closed_form_eigenvalues(cfg.momenta(edge[:, 0], edge[:, 1]), cfg)
    smallest = float(lm.min())
    if smallest <= top:
        msgs.append(
            f"nmax={nmax}: smallest discarded eigenvalue {smallest:.4g} <= max(lambda)+8*width = {top:.4g}"
        )
    if kmax >= 0:
        q_disc = (kmax + 1) * min(cfg.L1, cfg.L2)
        damp = math.exp(-0.5 * (q_disc * width / cfg.hbar) ** 2)
        if damp >= 1e-6:
            msgs.append(f"kmax={kmax}: Gaussian damping of the first discarded orbit is {damp:.3g} >= 1e-6")
    return msgs


def smoothed_compare(
    cfg: TorusConfig,
    lam_grid,
    width: float,
    nmax: int,
    kmax: int,
    strict: bool = False,
) -> CompareTable:
    """Gaussian-smoothed exact density against Weyl term plus orbit sum.

    The exact side sums ``g_w(lambda - lambda_n)`` over the table entries.
    The semiclassical side convolves the Poisson-summed density with the same
    Gaussian.  The convolution is done in the momentum variable, where every
    orbit term reads ``(L1 L2 / 2 pi hbar^2) sum_+- int g_w(lambda - lambda_+-(p)) J0(q p / hbar) p dp``;
    changing variables to ``lambda`` recovers the Weyl term and the Bessel sum.
    The integral uses composite Gauss-Legendre panels that resolve the
    fastest Bessel oscillation.

    Truncation is checked against the documented heuristics: the smallest
    discarded eigenvalue must exceed ``max(lambda) + 8 width`` and the first
    discarded orbit must be damped below 1e-6.  Violations emit a
    :class:`TruncationWarning`, or raise :class:`TruncationError` with ``strict``.
    """
    _require_special(cfg)
    if not width > 0:
        raise ValueError("smoothing width must be positive")
    lam_grid = np.asarray(lam_grid, dtype=float)
    msgs = _truncation_checks(cfg, lam_grid, width, nmax, kmax)
    for m in msgs:
        if strict:
            raise TruncationError(m)
        warnings.warn(m, TruncationWarning, stacklevel=2)

    table = exact_eigenvalues(cfg, nmax, verify=False)
    ev = table.lam
    exact = np.array([_gauss(l - ev, width).sum() for l in lam_grid])

    a = cfg.a
    hb = cfg.hbar
    q, mult = orbit_lengths(cfg, kmax)
    # momentum range covering lambda_+-(p) within 9 widths of the grid
    p_hi = float(lam_grid.max()) + 9 * width + a
    q_max = float(q.max()) if q.size else 0.0
    panel = min(0.05, 8 * hb / q_max) if q_max > 0 else 0.05
    p, wq = _gl_nodes(0.0, p_hi, panel)
    h = np.hypot(p, a / 2)
    branches = (h + a / 2, p * p / (h + a / 2) if a > 0 else p.copy())
    S = np.zeros_like(p)
    chunk = 256
    for i in range(0, len(q), chunk):
        S += j0(np.outer(p, q[i : i + chunk]) / hb) @ mult[i : i + chunk]
    pref = cfg.area / (2 * math.pi * hb**2)
    weyl = np.zeros(len(lam_grid))
    osc = np.zeros(len(lam_grid))
    for i, l in enumerate(lam_grid):
        kern = sum(_gauss(l - lb, width) for lb in branches) * p * wq
        weyl[i] = pref * kern.sum()
        osc[i] = pref * (kern @ S)
    diag = {"truncation": msgs, "orbits": int(mult.sum()), "distinct_lengths": int(len(q)), "nodes": int(len(p))}
    return CompareTable(lam_grid, exact, weyl, weyl + osc, diag)
