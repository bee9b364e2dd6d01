"""Spin and colour transport, precession equations and the Wong flow.

All integrators are fixed-step classical RK4.  Transport matrices are never
re-unitarised; their unitarity drift is returned as a diagnostic.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.linalg import expm

from .algebra import SIGMA, AbelianField, GaugeField, field_strength, pauli_dot
from .symbols import Couplings, HamiltonianKind

__all__ = [
    "TransportIntegrationError",
    "FlowDomainError",
    "ClassicalState",
    "TransportPath",
    "Trajectory",
    "spin_precession_rhs",
    "colour_precession_rhs",
    "integrate_transport",
    "torus_constant_field_d",
    "integrate_wong",
    "free_trajectory",
    "holonomy_character",
    "conjugate_vector",
]


class TransportIntegrationError(RuntimeError):
    """Transport matrix lost unitarity beyond tolerance."""


class FlowDomainError(RuntimeError):
    """Square-root Hamiltonian radicand turned negative during the flow."""

    def __init__(self, t: float, radicand: float):
        self.t = float(t)
        self.radicand = float(radicand)
        super().__init__(
            f"radicand {self.radicand:.6g} < 0 at t={self.t:.6g}; "
            "reduce the spin/colour coupling or start at larger virtuality"
        )


@dataclass(frozen=True)
class ClassicalState:
    """Phase-space point; ``C`` and ``s`` are in units of hbar."""

    p: np.ndarray
    x: np.ndarray
    C: np.ndarray | None = None
    s: np.ndarray | None = None

    def __post_init__(self):
        for name in ("p", "x", "C", "s"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, np.asarray(val, dtype=float).copy())
        if self.p.shape != self.x.shape:
            raise ValueError("p and x must have the same dimension")
        if self.s is not None and self.s.shape != (3,):
            raise ValueError("spin vector must have three components")


_SIGMA_FLAT = SIGMA.reshape(3, 4)


def _cross(a, b):
    # np.cross has a large fixed overhead for 3-vectors
    return np.array(
        [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
    )


def _check_lambda(lam):
    if lam == 0:
        raise ValueError("virtuality lambda = 0: precession rate undefined")


def spin_precession_rhs(s, E, B, e: float, lam: float, branch: int = +1) -> np.ndarray:
    """Right-hand side ``s x (e / Lambda^+-) (B +- E)`` of spin precession.

    ``lam`` is the virtuality ``|pi|`` and ``Lambda^+- = branch * lam``.  On the
    positive branch this is ``s x (e/Lambda)(E + B)``.
    """
    _check_lambda(lam)
    s = np.asarray(s, dtype=float)
    F = np.asarray(B, dtype=float) + branch * np.asarray(E, dtype=float)
    return np.cross(s, (e / (branch * lam)) * F)


def colour_precession_rhs(C, p, A, g: float, lam: float, f: np.ndarray, branch: int = +1) -> np.ndarray:
    """``Cdot^a = -g (pi_mu / Lambda^+-) f^{abc} A_mu^b C^c``.

    Parameters
    ----------
    C : (n,) colour vector
    p : (d,) kinetic momentum ``pi``
    A : (d, n) potential coefficients ``A_mu^a``
    f : (n, n, n) real structure constants
    """
    _check_lambda(lam)
    C = np.asarray(C, dtype=float)
    v = np.asarray(p, dtype=float) / (branch * lam)
    h = v @ np.asarray(A, dtype=float)
    return -g * ((f @ C) @ h)


def conjugate_vector(d: np.ndarray, generators: np.ndarray, v) -> np.ndarray:
    """Adjoint action ``R(d) v`` with ``R_ab = tr(d^dag X^a d X^b) / 2``.

    If ``v^a = (hbar/2) u^dag X^a u`` then ``(R v)^a = (hbar/2) u^dag d^dag X^a d u``.
    """
    Xd = np.einsum("ji,ajk,kl->ail", d.conj(), generators, d)
    R = 0.5 * np.einsum("aij,bji->ab", Xd, generators).real
    return R @ np.asarray(v, dtype=float)


def holonomy_character(d: np.ndarray, tol: float | None = None) -> float:
    """Real part of ``tr d``.

    The imaginary part is a diagnostic; with ``tol`` set, a larger imaginary
    part raises ``ValueError``.
    """
    tr = complex(np.trace(d))
    if tol is not None and abs(tr.imag) > tol:
        raise ValueError(f"character has imaginary part {tr.imag:.3g}")
    return tr.real


@dataclass
class TransportPath:
    t: np.ndarray
    d: np.ndarray  # (n, J, J)
    unitarity_drift: float
    det_drift: float


@dataclass
class Trajectory:
    """Uniformly sampled flow with the time derivatives at every sample."""

    kind: HamiltonianKind
    dt: float
    t: np.ndarray
    x: np.ndarray
    p: np.ndarray
    xdot: np.ndarray
    C: np.ndarray | None = None
    s: np.ndarray | None = None
    H: np.ndarray | None = None
    energy: float = float("nan")
    casimir2: np.ndarray | None = None
    casimir3: np.ndarray | None = None
    spin2: np.ndarray | None = None
    d_colour: np.ndarray | None = None
    d_spin: np.ndarray | None = None
    meta: dict = dc_field(default_factory=dict)

    def drifts(self) -> dict:
        """Maximal relative drift of every conserved quantity."""
        out = {}

        def rel(series):
            ref = series[0]
            scale = abs(ref) if ref != 0 else 1.0
            return float(np.max(np.abs(series - ref)) / scale)

        if self.H is not None:
            out["energy"] = rel(self.H)
        if self.casimir2 is not None:
            out["casimir2"] = rel(self.casimir2)
        if self.casimir3 is not None:
            out["casimir3"] = rel(self.casimir3)
        if self.spin2 is not None:
            out["spin2"] = rel(self.spin2)
        for name in ("d_colour", "d_spin"):
            d = getattr(self, name)
            if d is not None:
                eye = np.eye(d.shape[-1])
                dd = np.einsum("nji,njk->nik", d.conj(), d)
                out[f"unitarity_{name[2:]}"] = float(np.max(np.abs(dd - eye)))
        return out

    def columns(self) -> tuple[list[str], np.ndarray]:
        dim = self.x.shape[1]
        names = ["t"] + [f"x{m + 1}" for m in range(dim)] + [f"p{m + 1}" for m in range(dim)]
        cols = [self.t[:, None], self.x, self.p]
        if self.C is not None:
            names += [f"C{a + 1}" for a in range(self.C.shape[1])]
            cols.append(self.C)
        if self.s is not None:
            names += ["s1", "s2", "s3"]
            cols.append(self.s)
        if self.H is not None:
            names.append("Lambda")
            cols.append(self.H[:, None])
        for name in ("casimir2", "casimir3", "spin2"):
            series = getattr(self, name)
            if series is not None:
                names.append(f"{name}_residual")
                cols.append((series - series[0])[:, None])
        return names, np.hstack(cols)

    def to_csv(self, path_or_file) -> None:
        names, data = self.columns()
        own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(names)
            for row in data:
                w.writerow([f"{v:.17g}" for v in row])
        finally:
            if own:
                fh.close()


def _rk4_linear(gen_at, n_steps: int, h: float, d0: np.ndarray) -> np.ndarray:
    """RK4 for ``ddot = G(t) d`` with ``gen_at(i, stage)`` giving G at step i.

    ``stage`` is 0 (start), 1 (midpoint) or 2 (end).
    """
    out = np.empty((n_steps + 1,) + d0.shape, dtype=complex)
    d = d0.astype(complex)
    out[0] = d
    for i in range(n_steps):
        G0, G1, G2 = gen_at(i, 0), gen_at(i, 1), gen_at(i, 2)
        k1 = G0 @ d
        k2 = G1 @ (d + 0.5 * h * k1)
        k3 = G1 @ (d + 0.5 * h * k2)
        k4 = G2 @ (d + h * k3)
        d = d + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        out[i + 1] = d
    return out


def integrate_transport(
    kind: str,
    trajectory: Trajectory,
    field,
    couplings: Couplings = Couplings(),
    dt: float | None = None,
    tol: float = 1e-6,
) -> TransportPath:
    """Integrate a spin or colour transport equation along ``trajectory``.

    colour: ``ddot = (ig/2) xdot_mu A_mu^a(x) X^a d`` with ``xdot = dLambda/dp``.
    spin:   ``ddot = (ie / 2 Lambda^+-) sigma.(B +- E)(x) d`` (Abelian field).

    RK4 needs the generator at step midpoints; these are taken from the
    trajectory samples, so the transport step ``dt`` must be an even multiple
    of the sampling interval (default: twice it).

    Raises
    ------
    TransportIntegrationError
        if ``max |d^dag d - 1|`` exceeds ``tol``.
    """
    h_traj = trajectory.dt
    stride = 2 if dt is None else dt / h_traj
    if abs(stride - round(stride)) > 1e-9 or round(stride) % 2 or round(stride) < 2:
        raise ValueError("transport dt must be an even multiple of the trajectory sampling step")
    stride = int(round(stride))
    n_samples = len(trajectory.t)
    n_steps = (n_samples - 1) // stride
    if n_steps < 1:
        raise ValueError("trajectory too short for one transport step")
    h = stride * h_traj
    branch = trajectory.kind.sign
    idx = lambda i, stage: i * stride + stage * (stride // 2)  # noqa: E731

    if kind == "colour":
        if not isinstance(field, GaugeField):
            raise TypeError("colour transport needs a GaugeField")
        g = couplings.resolve_g(field)
        X = field.algebra.generators
        cache = {}

        def gen_at(i, stage):
            j = idx(i, stage)
            if j not in cache:
                h_a = trajectory.xdot[j] @ np.asarray(field.A(trajectory.x[j]), dtype=float)
                cache[j] = 0.5j * g * np.tensordot(h_a, X, axes=(0, 0))
            return cache[j]

        d0 = np.eye(field.algebra.dim_rep, dtype=complex)
    elif kind == "spin":
        if not isinstance(field, AbelianField):
            raise TypeError("spin transport needs an AbelianField")
        e = couplings.resolve_e(field)
        cache = {}

        def gen_at(i, stage):
            j = idx(i, stage)
            if j not in cache:
                xj = trajectory.x[j]
                pi = trajectory.p[j] - e * np.asarray(field.A(xj), dtype=float)
                lam = branch * float(np.sqrt(pi @ pi))
                if lam == 0:
                    raise TransportIntegrationError(f"Lambda = 0 at t={trajectory.t[j]:.6g}")
                fs = field.field_strength(xj)
                cache[j] = 0.5j * e / lam * pauli_dot(fs.B[0] + branch * fs.E[0])
            return cache[j]

        d0 = np.eye(2, dtype=complex)
    else:
        raise ValueError(f"unknown transport kind {kind!r}; expected 'spin' or 'colour'")

    d = _rk4_linear(gen_at, n_steps, h, d0)
    eye = np.eye(d0.shape[0])
    drift = float(np.max(np.abs(np.einsum("nji,njk->nik", d.conj(), d) - eye)))
    det_drift = float(np.max(np.abs(np.abs(np.linalg.det(d)) - 1.0)))
    if drift > tol:
        raise TransportIntegrationError(
            f"unitarity drift {drift:.3g} exceeds {tol:.3g}; use a smaller dt"
        )
    t = trajectory.t[0] + h * np.arange(n_steps + 1)
    return TransportPath(t=t, d=d, unitarity_drift=drift, det_drift=det_drift)


def torus_constant_field_d(p, q: float, g: float, A: float, lam: float | None = None) -> np.ndarray:
    """Closed-form colour transport along a straight torus orbit of length ``q``.

    The SU(2) field has ``A_1 = A e_1``, ``A_2 = A e_2``; the result is
    ``exp(+i (gA / 2 lambda) p_mu sigma^mu q)`` and its trace is ``2 cos(gAq/2)``.
    """
    p = np.asarray(p, dtype=float)
    lam = float(np.hypot(p[0], p[1])) if lam is None else float(lam)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    gen = (g * A / (2 * lam)) * q * (p[0] * SIGMA[0] + p[1] * SIGMA[1])
    return expm(1j * gen)


def free_trajectory(p, x0, T: float, dt: float, branch: int = +1) -> Trajectory:
    """Straight line generated by ``+-|p|``; ``p`` is constant."""
    p = np.asarray(p, dtype=float)
    lam = float(np.sqrt(p @ p))
    if lam == 0:
        raise ValueError("free flow undefined at p = 0")
    n = int(round(T / dt))
    if n < 1 or abs(n * dt - T) > 1e-9 * max(T, 1.0):
        raise ValueError("T must be a positive integer multiple of dt")
    t = dt * np.arange(n + 1)
    v = branch * p / lam
    x = np.asarray(x0, dtype=float)[None, :] + t[:, None] * v[None, :]
    kind = HamiltonianKind.FreePlus if branch > 0 else HamiltonianKind.FreeMinus
    return Trajectory(
        kind=kind,
        dt=dt,
        t=t,
        x=x,
        p=np.repeat(p[None, :], n + 1, axis=0),
        xdot=np.repeat(v[None, :], n + 1, axis=0),
        H=np.full(n + 1, branch * lam),
        energy=branch * lam,
    )


class _Flow:
    """Hamilton vector field for the Free, Wong and Triple families.

    The phase-space point is packed as ``y = (x, p, C, s)``.  ``rhs`` returns
    ``dy/dt``, the Hamiltonian value and ``w = (dH/dC, dH/ds)``, which drives
    the co-transported matrices.
    """

    def __init__(self, kind: HamiltonianKind, field: GaugeField | None, g: float, dim: int):
        self.kind = kind
        self.fam = kind.family
        self.sign = kind.sign
        self.field = field
        self.g = g
        self.dim = dim
        self.n = 0 if self.fam == "free" else field.algebra.n_gen
        self.n_s = 3 if self.fam == "triple" else 0
        self.sl_x = slice(0, dim)
        self.sl_p = slice(dim, 2 * dim)
        self.sl_C = slice(2 * dim, 2 * dim + self.n)
        self.sl_s = slice(2 * dim + self.n, 2 * dim + self.n + self.n_s)
        self._zeros = np.zeros(dim)
        if self.fam == "free":
            return
        self.f = field.algebra.f
        self.const = field.is_constant
        if self.const:
            self.A0 = np.asarray(field.constant_value, dtype=float)
            if self.fam == "triple":
                fs = field_strength(field, np.zeros(field.d))
                self.G = np.ascontiguousarray(fs.B + self.sign * fs.E)  # (n, 3)
        elif self.fam == "triple":
            raise ValueError("the combined-limit flow is implemented for constant fields only")

    def pack(self, x, p, C=None, s=None) -> np.ndarray:
        parts = [x, p]
        if self.n:
            parts.append(C)
        if self.n_s:
            parts.append(s)
        return np.concatenate(parts).astype(float)

    def rhs(self, t, y):
        g = self.g
        x = y[self.sl_x]
        p = y[self.sl_p]
        if self.fam == "free":
            R = p @ p
            if R <= 0:
                raise FlowDomainError(t, R)
            H = self.sign * np.sqrt(R)
            return np.concatenate([p / H, self._zeros]), H, None
        C = y[self.sl_C]
        A = self.A0 if self.const else np.asarray(self.field.A(x), dtype=float)
        pi = p - g * (A @ C)
        R = pi @ pi
        if self.fam == "triple":
            s = y[self.sl_s]
            GC = C @ self.G
            R = R - 2 * g * (s @ GC)
        if R <= 0:
            raise FlowDomainError(t, R)
        H = self.sign * np.sqrt(R)
        r = g / H
        if self.const:
            pdot = self._zeros
        else:
            dA = np.asarray(self.field.dA(x), dtype=float)  # dA[nu, mu, a]
            pdot = r * ((dA @ C) @ pi)
        if self.fam == "wong":
            dHdC = -r * (pi @ A)
            return np.concatenate([pi / H, pdot, (self.f @ C) @ dHdC]), H, dHdC
        dHdC = -r * (pi @ A + self.G @ s)
        dHds = -r * GC
        sdot = -_cross(s, dHds)
        dy = np.concatenate([pi / H, pdot, (self.f @ C) @ dHdC, sdot])
        return dy, H, np.concatenate([dHdC, dHds])


def _transport_basis(field: GaugeField, spin: bool) -> np.ndarray:
    """Flattened block-diagonal generators ``diag(X^a, 0)`` and ``diag(0, sigma_i)``."""
    X = field.algebra.generators
    n, J = X.shape[0], X.shape[1]
    K = J + (2 if spin else 0)
    out = np.zeros((n + (3 if spin else 0), K, K), dtype=complex)
    out[:n, :J, :J] = X
    if spin:
        out[n:, J:, J:] = SIGMA
    return out.reshape(out.shape[0], K * K)


def integrate_wong(
    state0: ClassicalState,
    field: GaugeField | None,
    g: float | None,
    T: float,
    dt: float,
    kind: HamiltonianKind = HamiltonianKind.WongPlus,
    transport: bool = False,
    store_every: int = 1,
) -> Trajectory:
    """Integrate the Wong equations (optionally with spin) by RK4.

    Hamilton's equations for ``(x, p)`` are coupled to colour precession
    ``Cdot^a = f^{abc} C^c dH/dC^b`` and, for the Triple kinds, to spin
    precession ``sdot = -s x dH/ds``.  Supported kinds: Free, Wong and Triple
    (both branches).  With ``transport=True`` the colour (and spin) transport
    matrices ``ddot = -(i/2)(dH/dC^a) X^a d`` are co-integrated in the same
    RK4 stages; they never feed back into the flow.

    Raises
    ------
    FlowDomainError
        when a square-root radicand becomes non-positive.
    """
    if kind.family not in ("free", "wong", "triple"):
        raise ValueError(f"integrate_wong does not support {kind.name}")
    if kind.family != "free" and field is None:
        raise ValueError(f"{kind.name} needs a gauge field")
    if field is not None:
        g = Couplings(g=g).resolve_g(field)
    n_steps = int(round(T / dt))
    if n_steps < 1 or abs(n_steps * dt - T) > 1e-9 * max(T, 1.0):
        raise ValueError("T must be a positive integer multiple of dt")
    if store_every < 1 or n_steps % store_every:
        raise ValueError("store_every must divide the number of steps")
    colour = kind.family != "free"
    spin = kind.family == "triple"
    if colour and state0.C is None:
        raise ValueError("initial colour vector required")
    if spin and state0.s is None:
        raise ValueError("initial spin vector required")
    dim = state0.x.size
    flow = _Flow(kind, field, g, dim)
    y = flow.pack(state0.x, state0.p, state0.C, state0.s)

    basis = _transport_basis(field, spin) if (transport and colour) else None
    if basis is not None:
        K = int(round(np.sqrt(basis.shape[1])))
        D = np.eye(K, dtype=complex)
        gen = lambda w: (-0.5j * (w @ basis)).reshape(K, K)  # noqa: E731

    m = n_steps // store_every + 1
    Y = np.empty((m, y.size))
    Ydot = np.empty((m, y.size))
    Hs = np.empty(m)
    Ds = np.empty((m, K, K), dtype=complex) if basis is not None else None

    t = 0.0
    k1, H, w1 = flow.rhs(t, y)
    Y[0], Ydot[0], Hs[0] = y, k1, H
    if Ds is not None:
        Ds[0] = D
    half = 0.5 * dt
    sixth = dt / 6.0
    for step in range(1, n_steps + 1):
        k2, _, w2 = flow.rhs(t + half, y + half * k1)
        k3, _, w3 = flow.rhs(t + half, y + half * k2)
        k4, _, w4 = flow.rhs(t + dt, y + dt * k3)
        if basis is not None:
            G1, G2, G3, G4 = gen(w1), gen(w2), gen(w3), gen(w4)
            a1 = G1 @ D
            a2 = G2 @ (D + half * a1)
            a3 = G3 @ (D + half * a2)
            a4 = G4 @ (D + dt * a3)
            D = D + sixth * (a1 + 2 * a2 + 2 * a3 + a4)
        y = y + sixth * (k1 + 2 * k2 + 2 * k3 + k4)
        t = step * dt
        k1, H, w1 = flow.rhs(t, y)
        if step % store_every == 0:
            j = step // store_every
            Y[j], Ydot[j], Hs[j] = y, k1, H
            if Ds is not None:
                Ds[j] = D

    h = dt * store_every
    traj = Trajectory(
        kind=kind,
        dt=h,
        t=h * np.arange(m),
        x=Y[:, flow.sl_x].copy(),
        p=Y[:, flow.sl_p].copy(),
        xdot=Ydot[:, flow.sl_x].copy(),
        C=Y[:, flow.sl_C].copy() if colour else None,
        s=Y[:, flow.sl_s].copy() if spin else None,
        H=Hs,
        energy=float(Hs[0]),
    )
    if Ds is not None:
        J = field.algebra.dim_rep
        traj.d_colour = Ds[:, :J, :J].copy()
        if spin:
            traj.d_spin = Ds[:, J:, J:].copy()
    if colour:
        traj.casimir2 = np.einsum("na,na->n", traj.C, traj.C)
        if field.algebra.N >= 3:
            traj.casimir3 = np.einsum("abc,na,nb,nc->n", field.algebra.dsym, traj.C, traj.C, traj.C)
    if spin:
        traj.spin2 = np.einsum("ni,ni->n", traj.s, traj.s)
    return traj
