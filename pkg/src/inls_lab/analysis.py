"""Post-processing of trajectories: blow-up time and rate fits, mass
concentration windows, rescaled-profile convergence, and the inner/outer
space-frequency decomposition with its critical-norm window series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft
from scipy.optimize import minimize_scalar

from .core import Field, rescale
from .errors import ValidationError
from .evolution import Trajectory
from .ground_state import GroundState
from . import functionals as fn


@dataclass(frozen=True)
class BlowupFit:
    T_hat: float
    exponent: float
    r_squared: float
    window: tuple[float, float]


def estimate_blowup_time(traj: Trajectory, s_c: float) -> BlowupFit:
    """Estimate the blow-up time and rate from the gradient-norm series.

    The lower-bound linearization (grad norm)^(-2/(1-s_c)) is affine in t at
    the minimal rate, so its least-squares t-intercept over the final decade
    of gradient growth seeds the estimate; the estimate is then refined by
    maximizing the log-log fit quality of grad norm against (T - t), which
    also guards faster-than-minimal collapse, where the linearization alone
    lands before the last sample.  The refined fit supplies the exponent.
    """
    ts = traj.times()
    gs = traj.grad_norms()
    if len(ts) < 4:
        raise ValidationError("trajectory too short to fit a blow-up time")
    g_max = gs.max()
    if g_max < 10.0 * gs[0]:
        raise ValidationError(
            "no blow-up regime detected: gradient norm grew by "
            f"{g_max / gs[0]:.2f}x (< 10x)"
        )
    msk = gs >= g_max / 10.0
    t_w, g_w = ts[msk], gs[msk]
    if len(t_w) < 20:
        raise ValidationError(
            f"only {len(t_w)} samples in the final decade of gradient growth (need >= 20)"
        )
    y = g_w ** (-2.0 / (1.0 - s_c))
    slope, intercept = np.polyfit(t_w, y, 1)
    t_last = float(t_w[-1])
    T0 = -intercept / slope if slope < 0 else t_last
    span = t_last - float(t_w[0])
    ly = np.log(g_w)

    def misfit(T):
        lx = np.log(T - t_w)
        c = np.polyfit(lx, ly, 1)
        return float(np.sum((ly - np.polyval(c, lx)) ** 2))

    hi = max(t_last + 4.0 * span, T0 + span)
    res = minimize_scalar(
        misfit, bounds=(t_last + 1e-12 * max(1.0, t_last), hi),
        method="bounded", options={"xatol": 1e-13},
    )
    T_hat = float(res.x)
    lx = np.log(T_hat - t_w)
    c = np.polyfit(lx, ly, 1)
    ss_res = float(np.sum((ly - np.polyval(c, lx)) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    return BlowupFit(
        T_hat=T_hat,
        exponent=float(c[0]),
        r_squared=max(0.0, 1.0 - ss_res / ss_tot) if ss_tot > 0 else 0.0,
        window=(float(t_w[0]), t_last),
    )


@dataclass(frozen=True)
class ConcentrationRecord:
    time: float
    value: float
    center: float
    radius: float
    window_grad_product: float


def mass_concentration_series(
    traj: Trajectory, alpha: float, fit: BlowupFit
) -> list[ConcentrationRecord]:
    """Window masses sup_y over balls of radius (T_hat - t)^alpha per snapshot.

    The hypothesis lambda(t) * |grad u(t)| -> infinity is reported through
    window_grad_product rather than enforced.
    """
    if not 0.0 < alpha < 0.5:
        raise ValidationError(f"alpha must lie in (0, 1/2), got {alpha}")
    snaps = traj.snapshots()
    if not snaps:
        raise ValidationError("trajectory holds no field snapshots")
    out = []
    for s in snaps:
        gap = fit.T_hat - s.time
        if gap <= 0:
            continue
        lam = gap ** alpha
        val, ctr = fn.sup_concentrated_mass(s.snapshot, lam)
        out.append(
            ConcentrationRecord(
                time=s.time, value=val, center=ctr, radius=lam,
                window_grad_product=lam * math.sqrt(s.grad_norm_sq),
            )
        )
    return out


@dataclass(frozen=True)
class RescaledProfile:
    field: Field           # rescaled slice, not phase-aligned
    rho: float
    theta: float           # phase maximizing Re<e^{i theta} v, Q>
    err: float             # relative H1 distance of the aligned slice to Q


def rescaled_profile(u: Field, gs: GroundState) -> RescaledProfile:
    """Rescale u to the ground-state gradient scale and align its phase.

    rho = |grad Q| / |grad u|; err is the relative H1 distance between the
    phase-aligned rescaled slice and Q.
    """
    if not u.params.mass_critical:
        raise ValidationError("rescaled-profile comparison requires mass-critical parameters")
    g_u = fn.grad_norm_sq(u)
    if g_u <= 0:
        raise ValidationError("cannot rescale a field with vanishing gradient")
    rho = math.sqrt(fn.grad_norm_sq(gs.profile) / g_u)
    v = rescale(u, rho)
    q = gs.profile.values
    ip = complex(np.sum(v.values * q * u.grid.weights))
    theta = float(-np.angle(ip)) if ip != 0 else 0.0
    diff = u.with_values(np.exp(1j * theta) * v.values - q)
    h1 = lambda f: math.sqrt(fn.mass(f) + fn.grad_norm_sq(f))
    return RescaledProfile(field=v, rho=rho, theta=theta, err=h1(diff) / h1(gs.profile))


# ---------------------------------------------------------------------------
# space/frequency decomposition


def window_radii(u: Field, u0_mass: float, c1: float = 1.0, c2: float = 1.0):
    """Spatial radius R and frequency radius rho of the concentration windows.

    R = c1 ||u0||^((sigma+2)/(sigma(N-1)+b)) / |grad u|^((2-sigma)/(sigma(N-1)+b)),
    rho = c2 |grad u|^(1/(1-s_c)).
    """
    p = u.params
    if not p.intercritical:
        raise ValidationError("window radii are defined for intercritical parameters")
    if p.sigma >= 2.0:
        raise ValidationError(f"need sigma < 2, got sigma={p.sigma}")
    if p.dim < 2:
        raise ValidationError("window radii require N >= 2")
    g = math.sqrt(fn.grad_norm_sq(u))
    denom = p.sigma * (p.dim - 1) + p.b
    R = c1 * math.sqrt(u0_mass) ** ((p.sigma + 2.0) / denom) * g ** (-(2.0 - p.sigma) / denom)
    rho = c2 * g ** (1.0 / (1.0 - p.s_c))
    return R, rho


def smooth_cutoff(s: np.ndarray) -> np.ndarray:
    """Radial cutoff: 1 on [0,1], 0 on [2,inf), cubic smoothstep between."""
    tau = np.clip(np.asarray(s, dtype=float) - 1.0, 0.0, 1.0)
    return 1.0 - 3.0 * tau ** 2 + 2.0 * tau ** 3


def _bump(z2: np.ndarray) -> np.ndarray:
    """Unnormalized mollifier profile (1 - |x|^2)^3 on the unit ball."""
    return np.maximum(1.0 - z2, 0.0) ** 3


def _mollify_line(u1: np.ndarray, grid, rho: float) -> np.ndarray:
    n, dx = grid.n, grid.spacing
    m = np.arange(n)
    disp = ((m + n // 2) % n - n // 2) * dx   # fft-ordered displacements
    kern = _bump((rho * disp) ** 2)
    total = kern.sum()
    if total <= 0:  # kernel narrower than one cell: discrete identity
        return u1.copy()
    multiplier = scipy.fft.fft(kern / total)
    return scipy.fft.ifft(scipy.fft.fft(u1) * multiplier)


def _mollify_radial(u1: np.ndarray, grid, rho: float) -> np.ndarray:
    """Row-normalized banded kernel from the angular reduction of the
    N-dimensional convolution with the compactly supported bump."""
    n, dr, N = grid.n, grid.spacing, grid.dim
    r = grid.nodes
    w = grid.weights
    K = int(np.ceil(1.0 / (rho * dr))) + 1
    out = np.zeros_like(u1)
    if N == 2:
        th = np.linspace(0.0, np.pi, 32)
        ang_w = np.full(th.size, 1.0 / (th.size - 1))
        ang_w[0] *= 0.5
        ang_w[-1] *= 0.5
        mu = np.cos(th)
    else:
        # Gauss-Legendre in mu = cos(theta) with weight (1 - mu^2)^((N-3)/2)
        mu, glw = np.polynomial.legendre.leggauss(32)
        ang_w = glw * (1.0 - mu ** 2) ** ((N - 3) / 2.0)
        ang_w = ang_w / ang_w.sum()
    chunk = max(1, int(2e6 / (2 * K + 1) / mu.size))
    for start in range(0, n, chunk):
        idx = np.arange(start, min(start + chunk, n))
        j0 = np.maximum(idx - K, 0)
        offs = np.arange(2 * K + 1)
        jj = j0[:, None] + offs[None, :]
        valid = jj < n
        jj = np.minimum(jj, n - 1)
        ri = r[idx][:, None, None]
        rj = r[jj][:, :, None]
        d2 = ri ** 2 + rj ** 2 - 2.0 * ri * rj * mu[None, None, :]
        ker = (_bump(rho ** 2 * np.maximum(d2, 0.0)) * ang_w[None, None, :]).sum(axis=2)
        rows = ker * w[jj] * valid
        sums = rows.sum(axis=1)
        sums[sums <= 0] = 1.0
        out[idx] = (rows * u1[jj]).sum(axis=1) / sums
    return out


@dataclass
class DecompositionResult:
    u1L: Field
    u1H: Field
    u2: Field
    R: float
    rho: float

    def reconstruction_error(self, u: Field) -> float:
        total = self.u1L.values + self.u1H.values + self.u2.values
        num = math.sqrt(fn.mass(u.with_values(total - u.values)))
        den = math.sqrt(fn.mass(u))
        return num / den if den > 0 else num


def decompose(u: Field, R: float, rho_freq: float) -> DecompositionResult:
    """Split u into inner low/high-frequency parts and an outer part.

    u1 = cutoff(|x|/R) u,  u2 = u - u1,  u1L = mollifier_rho * u1,
    u1H = u1 - u1L.  The discrete mollifier rows are normalized to unit sum
    (the grid realization of a unit-integral kernel), so constants are
    reproduced exactly and u1L -> u1 as rho_freq -> infinity.
    """
    if not (R > 0 and rho_freq > 0):
        raise ValidationError("R and rho_freq must be positive")
    vals = u.values.astype(complex)
    u1 = smooth_cutoff(np.abs(u.grid.nodes) / R) * vals
    u2 = vals - u1
    if u.grid.geometry == "line":
        u1L = _mollify_line(u1, u.grid, rho_freq)
    else:
        u1L = _mollify_radial(u1, u.grid, rho_freq)
    u1H = u1 - u1L
    return DecompositionResult(
        u1L=u.with_values(u1L), u1H=u.with_values(u1H), u2=u.with_values(u2),
        R=float(R), rho=float(rho_freq),
    )


@dataclass(frozen=True)
class WindowRecord:
    time: float
    radius: float
    value: float          # integral of |u|^sigma_c over the window
    running_extreme: float


def sigma_c_window_series(
    traj: Trajectory,
    fit: BlowupFit,
    mode: str,
    c0: float = 10.0,
    c0_tilde: float = 1.0,
) -> list[WindowRecord]:
    """Critical-norm window integrals along the trajectory snapshots.

    mode "fint": window radius c0^2 |grad u|^(-1/(1-s_c)), running minimum.
    mode "inft": the spatial-decomposition radius scaling, running maximum.
    """
    if mode not in ("fint", "inft"):
        raise ValidationError(f"mode must be 'fint' or 'inft', got {mode!r}")
    snaps = traj.snapshots()
    if not snaps:
        raise ValidationError("trajectory holds no field snapshots")
    p = snaps[0].snapshot.params
    if not p.intercritical:
        raise ValidationError("critical-norm windows require intercritical parameters")
    m0 = traj.initial_mass
    denom = p.sigma * (p.dim - 1) + p.b
    out: list[WindowRecord] = []
    extreme = None
    for s in snaps:
        g = math.sqrt(s.grad_norm_sq)
        if mode == "fint":
            rad = c0 ** 2 * g ** (-1.0 / (1.0 - p.s_c))
        else:
            rad = c0_tilde * math.sqrt(m0) ** ((p.sigma + 2.0) / denom) * g ** (-(2.0 - p.sigma) / denom)
        val = fn.lp_norm(s.snapshot, p.sigma_c, region=(0.0, rad)) ** p.sigma_c
        if extreme is None:
            extreme = val
        extreme = min(extreme, val) if mode == "fint" else max(extreme, val)
        out.append(WindowRecord(time=s.time, radius=rad, value=val, running_extreme=extreme))
    return out


__all__ = [
    "BlowupFit", "estimate_blowup_time",
    "ConcentrationRecord", "mass_concentration_series",
    "RescaledProfile", "rescaled_profile",
    "window_radii", "smooth_cutoff", "decompose", "DecompositionResult",
    "WindowRecord", "sigma_c_window_series",
]
