"""Problem parameters, spatial grids, complex fields, and differential primitives.

Two discretizations are supported:

* ``line`` -- the whole real line periodized on [-L, L] with n cell-centered
  nodes; derivatives and inverse Helmholtz operators are exact in the
  discrete Fourier basis.
* ``radial`` -- radially symmetric fields on (0, Rmax] in dimension N >= 2,
  discretized by a flux-form (finite-volume) Laplacian on n cell-centered
  shells.  The zero-flux face at r = 0 realizes the even reflection
  condition; a ghost value -u[-1] realizes homogeneous Dirichlet at Rmax.

Both grids are cell-centered, so coordinates never hit the origin and the
singular weight |x|^-b stays finite.  The weight is stored as the exact
cell average of |x|^-b, which keeps quadratures of weighted integrands
second-order accurate despite the singularity.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.fft
from scipy.interpolate import make_interp_spline
from scipy.linalg import solve_banded

from .errors import ValidationError

MASS_CRITICAL_TOL = 1e-12


class Regime(Enum):
    MASS_CRITICAL = "mass_critical"
    INTERCRITICAL = "intercritical"
    # s_c < 0 cases, outside the blow-up theory; kept so closed-form NLS
    # solitons (b = 0) and quadrature oracles can exercise the machinery.
    SUBCRITICAL_VALIDATION = "subcritical_validation"


def sigma_star(dim: int, b: float) -> float:
    """Upper admissible nonlinearity power (infinite for dim <= 2)."""
    if dim <= 2:
        return math.inf
    return (2.0 - b) / (dim - 2.0)


def b_tilde(dim: int) -> float:
    """Upper end of the b-range with proven ground-state existence/uniqueness."""
    return dim / 3.0 if dim <= 3 else 2.0


@dataclass(frozen=True)
class ProblemParams:
    dim: int
    sigma: float
    b: float
    s_c: float
    sigma_c: float
    regime: Regime

    @property
    def mass_critical(self) -> bool:
        return self.regime is Regime.MASS_CRITICAL

    @property
    def intercritical(self) -> bool:
        return self.regime is Regime.INTERCRITICAL

    @property
    def proven_regime(self) -> bool:
        """True when (sigma, b) lies in the proven existence/uniqueness range."""
        return 0.0 < self.b < b_tilde(self.dim) and 0.0 < self.sigma < sigma_star(self.dim, self.b)

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "sigma": self.sigma,
            "b": self.b,
            "s_c": self.s_c,
            "sigma_c": self.sigma_c,
            "regime": self.regime.value,
        }


def make_params(dim: int, sigma: float, b: float) -> ProblemParams:
    """Validate (dim, sigma, b) and derive the criticality indices.

    b = 0 is accepted as a validation-only mode so that closed-form NLS
    solitons can serve as solver oracles; every b > 0 run must satisfy
    0 < b < min(2, dim) and sigma below the admissible ceiling.
    """
    if not isinstance(dim, (int, np.integer)) or dim < 1:
        raise ValidationError(f"dim must be a positive integer, got {dim!r}")
    if not sigma > 0:
        raise ValidationError(f"sigma must be > 0, got {sigma!r}")
    b = float(b)
    sigma = float(sigma)
    if b < 0 or (b != 0.0 and b >= min(2.0, dim)):
        raise ValidationError(
            f"b must lie in (0, min(2, dim)) = (0, {min(2.0, dim)}), got b={b}"
        )
    star = sigma_star(dim, b)
    if dim >= 3 and sigma >= star:
        raise ValidationError(
            f"sigma={sigma} is not below sigma*_b={star} for dim={dim}, b={b}"
        )
    s_c = dim / 2.0 - (2.0 - b) / (2.0 * sigma)
    sigma_c = 2.0 * dim * sigma / (2.0 - b)
    if abs(sigma - (2.0 - b) / dim) < MASS_CRITICAL_TOL:
        regime = Regime.MASS_CRITICAL
    elif 0.0 < s_c < 1.0:
        regime = Regime.INTERCRITICAL
    elif s_c < 0.0:
        regime = Regime.SUBCRITICAL_VALIDATION
    else:
        raise ValidationError(
            f"(dim={dim}, sigma={sigma}, b={b}) gives s_c={s_c}, outside the supported range"
        )
    return ProblemParams(dim=int(dim), sigma=sigma, b=b, s_c=s_c, sigma_c=sigma_c, regime=regime)


# ---------------------------------------------------------------------------
# grids


def _cell_avg_weight_line(x, dx, b):
    # cell edges are multiples of dx, so 0 is always an edge and every cell
    # lies on one side of the origin; the average is exact
    if b == 0.0:
        return np.ones_like(x)
    lo = np.maximum(np.abs(x) - dx / 2, np.zeros_like(x))
    hi = np.abs(x) + dx / 2
    return (hi ** (1 - b) - lo ** (1 - b)) / ((1 - b) * dx)


@dataclass(frozen=True)
class Grid:
    """Cell-centered spatial grid (line or radial geometry).

    ``weights`` integrates over the full N-dimensional volume: plain dx on
    the line, exact shell volumes A_N * (r_+^N - r_-^N)/N radially.
    ``weight_b`` is the exact cell average of |x|^-b used by all weighted
    quadratures, the elliptic solver, and the evolution phase.
    """

    geometry: str                 # "line" | "radial"
    dim: int
    extent: float                 # half-width L (line) or Rmax (radial)
    n: int
    b: float
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    weight_b: np.ndarray = field(repr=False)
    spacing: float = 0.0
    # radial-only face data (r^{N-1} at the n+1 cell faces)
    faces: np.ndarray | None = field(default=None, repr=False)
    face_alpha: np.ndarray | None = field(default=None, repr=False)
    surf: float = 0.0             # area of the unit sphere A_N (radial)
    wavenumbers: np.ndarray | None = field(default=None, repr=False)


def line_grid(half_width: float, n: int, b: float = 0.0) -> Grid:
    """Periodized line [-L, L] with n cell-centered nodes (dim = 1)."""
    if half_width <= 0 or n < 8:
        raise ValidationError(f"need half_width > 0 and n >= 8, got {half_width}, {n}")
    if not 0.0 <= b < 1.0:
        raise ValidationError(f"line geometry needs 0 <= b < 1 for integrability, got b={b}")
    dx = 2.0 * half_width / n
    nodes = -half_width + (np.arange(n) + 0.5) * dx
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=dx)
    return Grid(
        geometry="line", dim=1, extent=float(half_width), n=int(n), b=float(b),
        nodes=nodes, weights=np.full(n, dx), weight_b=_cell_avg_weight_line(nodes, dx, b),
        spacing=dx, wavenumbers=k,
    )


def radial_grid(dim: int, rmax: float, n: int, b: float = 0.0) -> Grid:
    """Radial shells on (0, Rmax] for dim >= 2 with exact volume weights."""
    if dim < 2:
        raise ValidationError("radial geometry requires dim >= 2 (use line_grid for dim=1)")
    if rmax <= 0 or n < 8:
        raise ValidationError(f"need rmax > 0 and n >= 8, got {rmax}, {n}")
    if not 0.0 <= b < dim:
        raise ValidationError(f"need 0 <= b < dim for integrability, got b={b}")
    dr = rmax / n
    nodes = (np.arange(n) + 0.5) * dr
    edges = np.arange(n + 1) * dr
    surf = 2.0 * np.pi ** (dim / 2.0) / math.gamma(dim / 2.0)
    shell = (edges[1:] ** dim - edges[:-1] ** dim) / dim
    if b == 0.0:
        wb = np.ones(n)
    else:
        wb = ((edges[1:] ** (dim - b) - edges[:-1] ** (dim - b)) / (dim - b)) / shell
    return Grid(
        geometry="radial", dim=int(dim), extent=float(rmax), n=int(n), b=float(b),
        nodes=nodes, weights=surf * shell, weight_b=wb, spacing=dr,
        faces=edges, face_alpha=edges ** (dim - 1), surf=surf,
    )


def grid_for(params: ProblemParams, extent: float, n: int) -> Grid:
    """Grid matching the geometry implied by params.dim."""
    if params.dim == 1:
        return line_grid(extent, n, params.b)
    return radial_grid(params.dim, extent, n, params.b)


# ---------------------------------------------------------------------------
# fields


@dataclass
class Field:
    """Complex grid function tied to a grid and problem parameters."""

    values: np.ndarray
    grid: Grid
    params: ProblemParams

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.shape != (self.grid.n,):
            raise ValidationError(
                f"field length {self.values.shape} does not match grid n={self.grid.n}"
            )

    def copy(self) -> "Field":
        return Field(self.values.copy(), self.grid, self.params)

    def with_values(self, values: np.ndarray) -> "Field":
        return Field(values, self.grid, self.params)

    def check_finite(self, context: str = "field") -> None:
        vals = self.values
        ok = np.all(np.isfinite(vals.real)) and (
            not np.iscomplexobj(vals) or np.all(np.isfinite(vals.imag))
        )
        if not ok:
            from .errors import NumericsError

            raise NumericsError(f"non-finite values detected in {context}")


# ---------------------------------------------------------------------------
# differential / spectral primitives


def _radial_lap_bands(grid: Grid, dtype=np.float64):
    """Sub/diag/super arrays of the flux-form radial Laplacian."""
    alpha = grid.face_alpha.astype(dtype)
    vol = (grid.weights / grid.surf).astype(dtype)
    dr = dtype(grid.spacing)
    lo = alpha[1:-1] / (dr * vol[1:])
    up = alpha[1:-1] / (dr * vol[:-1])
    dg = -(alpha[1:] + alpha[:-1]) / (dr * vol)
    dg[-1] = -(2.0 * alpha[-1] + alpha[-2]) / (dr * vol[-1])
    return lo, dg, up


def apply_radial_lap(grid: Grid, u: np.ndarray, bands=None) -> np.ndarray:
    lo, dg, up = bands if bands is not None else _radial_lap_bands(grid, u.real.dtype.type)
    out = dg * u
    out[1:] = out[1:] + lo * u[:-1]
    out[:-1] = out[:-1] + up * u[1:]
    return out


def laplacian(u: Field) -> Field:
    """Discrete Laplacian: exact spectral on the line, flux-form FD radially."""
    g = u.grid
    if g.geometry == "line":
        vals = scipy.fft.ifft(-(g.wavenumbers.astype(u.values.real.dtype) ** 2) * scipy.fft.fft(u.values))
        if not np.iscomplexobj(u.values):
            vals = vals.real
    else:
        vals = apply_radial_lap(g, u.values)
    return u.with_values(vals)


def gradient_values(grid: Grid, values: np.ndarray) -> np.ndarray:
    """Node-centered first derivative (spectral on the line, centered radially)."""
    if grid.geometry == "line":
        out = scipy.fft.ifft(1j * grid.wavenumbers * scipy.fft.fft(values))
        return out if np.iscomplexobj(values) else out.real
    dr = grid.spacing
    out = np.empty_like(values)
    out[1:-1] = (values[2:] - values[:-2]) / (2 * dr)
    out[0] = (values[1] - values[0]) / (2 * dr)          # even ghost at r=0
    out[-1] = (-values[-1] - values[-2]) / (2 * dr)      # Dirichlet ghost at Rmax
    return out


def helmholtz_solve(grid: Grid, rhs: np.ndarray, refine: bool = False) -> np.ndarray:
    """Solve (1 - Laplacian) u = rhs.

    Spectral division on the line; banded LAPACK solve radially.  With
    ``refine`` a single iterative-refinement pass is done in the rhs dtype,
    which recovers extended-precision accuracy when rhs is a longdouble
    array (the factorization itself stays in float64).
    """
    if grid.geometry == "line":
        k = grid.wavenumbers.astype(rhs.real.dtype)
        out = scipy.fft.ifft(scipy.fft.fft(rhs) / (1.0 + k ** 2))
        return out if np.iscomplexobj(rhs) else out.real
    bands64 = _radial_lap_bands(grid, np.float64)
    lo, dg, up = bands64
    n = grid.n
    ab = np.zeros((3, n))
    ab[0, 1:] = -up
    ab[1, :] = 1.0 - dg
    ab[2, :-1] = -lo
    x0 = solve_banded((1, 1), ab, np.asarray(rhs, dtype=np.float64)).astype(rhs.dtype)
    if not refine:
        return x0
    bands = _radial_lap_bands(grid, rhs.dtype.type)
    resid = rhs - (x0 - apply_radial_lap(grid, x0, bands))
    dx = solve_banded((1, 1), ab, np.asarray(resid, dtype=np.float64)).astype(rhs.dtype)
    return x0 + dx


# ---------------------------------------------------------------------------
# interpolation / rescaling


def _interp_spline(grid: Grid, values: np.ndarray, order: int = 3):
    """Spline evaluator with zero extension; radial data is mirrored through
    r = 0 so near-origin evaluations are well defined."""
    if grid.geometry == "line":
        xs, ys = grid.nodes, values
    else:
        xs = np.concatenate([-grid.nodes[::-1], grid.nodes])
        ys = np.concatenate([values[::-1], values])
    if np.iscomplexobj(values):
        sr = make_interp_spline(xs, ys.real, k=order)
        si = make_interp_spline(xs, ys.imag, k=order)

        def ev(pts):
            out = np.zeros(np.shape(pts), dtype=complex)
            m = (pts >= xs[0]) & (pts <= xs[-1])
            out[m] = sr(pts[m]) + 1j * si(pts[m])
            return out

    else:
        s = make_interp_spline(xs, ys, k=order)

        def ev(pts):
            out = np.zeros(np.shape(pts))
            m = (pts >= xs[0]) & (pts <= xs[-1])
            out[m] = s(pts[m])
            return out

    return ev


def sample_scaled(u: Field, scale: float, order: int = 3) -> np.ndarray:
    """Values of u(scale * x) on u's own grid, zero outside the domain."""
    ev = _interp_spline(u.grid, u.values, order=order)
    return ev(scale * u.grid.nodes)


def rescale(u: Field, rho: float) -> Field:
    """Scaling-symmetry action: rho^{(2-b)/(2 sigma)} u(rho x) on the same grid.

    Cubic interpolation with zero extension.  Warns when more than 1% of the
    field's mass lives where the shrunk image cannot represent it.
    """
    if not rho > 0:
        raise ValidationError(f"rho must be positive, got {rho}")
    p = u.params
    amp = rho ** ((2.0 - p.b) / (2.0 * p.sigma))
    vals = amp * sample_scaled(u, rho)
    if rho < 1.0:
        from .functionals import mass, concentrated_mass

        total = mass(u)
        if total > 0:
            inside = concentrated_mass(u, 0.0, rho * u.grid.extent)
            lost = 1.0 - inside / total
            if lost > 0.01:
                warnings.warn(
                    f"rescale(rho={rho:g}): {100 * lost:.1f}% of the mass falls "
                    "outside the representable window",
                    RuntimeWarning,
                    stacklevel=2,
                )
    return u.with_values(vals)


__all__ = [
    "Regime", "ProblemParams", "make_params", "sigma_star", "b_tilde",
    "Grid", "line_grid", "radial_grid", "grid_for",
    "Field",
    "laplacian", "gradient_values", "helmholtz_solve", "apply_radial_lap",
    "rescale", "sample_scaled",
]
