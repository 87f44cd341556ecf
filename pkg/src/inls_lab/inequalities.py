"""Executable checks of the functional inequalities, driven by a seeded
corpus of random localized fields.

Every check returns "left side minus right side" scaled by the natural
positive magnitude of its right side, so a satisfied inequality reports a
negative number and ``max_violation`` aggregates cleanly across a corpus.
The critical-norm check has no quantified constant to compare against and is
reported as a boundedness ratio instead.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field

import numpy as np

from .core import Field, Grid, ProblemParams, gradient_values
from .errors import ValidationError
from . import functionals as fn

DEFAULT_SEED = 0x1515


def corpus_rng(seed: int, label: str) -> np.random.Generator:
    """Counter-style RNG split: one master seed, one stream per label."""
    return np.random.default_rng([seed & 0xFFFFFFFF, zlib.crc32(label.encode())])


def random_bump_field(params: ProblemParams, grid: Grid, rng: np.random.Generator) -> Field:
    """Sum of 1-4 Gaussian bumps with random widths, centers, and phases,
    supported well inside the domain."""
    n_bumps = int(rng.integers(1, 5))
    x = grid.nodes
    vals = np.zeros(grid.n, dtype=complex)
    for _ in range(n_bumps):
        width = rng.uniform(0.4, 1.6)
        if grid.geometry == "line":
            center = rng.uniform(-0.5 * grid.extent, 0.5 * grid.extent)
        else:
            center = rng.uniform(0.0, 0.4 * grid.extent)
        amp = rng.uniform(0.2, 1.0)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        speed = rng.uniform(-2.0, 2.0)
        vals += amp * np.exp(-((x - center) ** 2) / (2.0 * width ** 2)) * np.exp(
            1j * (phase + speed * x)
        )
    return Field(vals, grid, params)


@dataclass
class InequalityReport:
    name: str
    trials: int
    max_violation: float
    witness: Field | None = field(default=None, repr=False)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_violation <= 1e-6

    def as_dict(self) -> dict:
        out = {
            "name": self.name,
            "trials": self.trials,
            "max_violation": self.max_violation,
            "passed": bool(self.passed),
        }
        out.update(self.extra)
        return out


# ---------------------------------------------------------------------------
# individual checks (raw, unscaled left - right)


def check_gagliardo(u: Field, k_opt: float) -> float:
    """potential(u) - K_opt |grad u|^(N sigma + b) mass^(sigma+1-(N sigma+b)/2) <= 0."""
    a = u.params.dim * u.params.sigma + u.params.b
    rhs = k_opt * fn.grad_norm_sq(u) ** (a / 2.0) * fn.mass(u) ** (
        (2.0 * u.params.sigma + 2.0 - a) / 2.0
    )
    return fn.potential(u) - rhs


def check_banica(v: Field, theta: np.ndarray, q_mass: float) -> float:
    """Squared momentum-type pairing minus 2 E(v) * int |v|^2 |grad theta|^2.

    Requires mass(v) <= q_mass (the ground-state mass), under which the
    energy is nonnegative and the right side is a genuine bound.
    """
    if fn.mass(v) > q_mass * (1.0 + 1e-12):
        raise ValidationError("check_banica requires mass(v) <= mass(Q)")
    grad_theta = gradient_values(v.grid, np.asarray(theta, dtype=float))
    dv = gradient_values(v.grid, v.values)
    lhs = float(np.sum(np.imag(v.values * np.conj(dv)) * grad_theta * v.grid.weights))
    weighted = float(np.sum(np.abs(v.values) ** 2 * grad_theta ** 2 * v.grid.weights))
    return lhs ** 2 - 2.0 * fn.energy(v) * weighted


def _tail_norms(u: Field, R: float):
    g = u.grid
    if g.geometry != "radial":
        raise ValidationError("radial tail bounds require radial geometry (N >= 2)")
    nodes = g.nodes
    tail = nodes >= R
    m_tail = float(np.sum(np.abs(u.values[tail]) ** 2 * g.weights[tail]))
    d = np.diff(u.values) / g.spacing
    faces_in = g.faces[1:-1] >= R
    g_tail = float(
        g.surf
        * (
            np.sum(g.face_alpha[1:-1][faces_in] * np.abs(d[faces_in]) ** 2) * g.spacing
            + g.face_alpha[-1] * 2.0 * np.abs(u.values[-1]) ** 2 / g.spacing
        )
    )
    return tail, m_tail, g_tail


def check_strauss(u: Field, R: float) -> float:
    """sup_{|x|>=R} |u| - R^{-(N-1)/2} ||u||_tail^{1/2} ||grad u||_tail^{1/2}."""
    if u.params.dim < 2:
        raise ValidationError("the radial decay bound needs N >= 2")
    if R <= u.grid.nodes[0]:
        raise ValidationError(f"R={R} must exceed the first node {u.grid.nodes[0]:.3g}")
    tail, m_tail, g_tail = _tail_norms(u, R)
    if not np.any(tail):
        return 0.0
    sup_tail = float(np.max(np.abs(u.values[tail])))
    rhs = R ** (-(u.params.dim - 1) / 2.0) * m_tail ** 0.25 * g_tail ** 0.25
    return sup_tail - rhs


def young_constant(sigma: float, eta: float) -> float:
    """Optimal constant in the split a*b <= eta a^{2/sigma} + C(eta) b^{2/(2-sigma)}."""
    return (2.0 - sigma) / 2.0 * (sigma / (2.0 * eta)) ** (sigma / (2.0 - sigma))


def check_radial_gn(u: Field, R: float, eta: float) -> float:
    """Tail potential minus eta * tail gradient - C(eta) R^{-2(sigma(N-1)+b)/(2-sigma)}
    * tail mass^{(sigma+2)/(2-sigma)}; expected <= 0."""
    p = u.params
    if p.sigma >= 2.0:
        raise ValidationError(f"need sigma < 2, got {p.sigma}")
    if p.dim < 2:
        raise ValidationError("radial interpolation bound needs N >= 2")
    if not eta > 0:
        raise ValidationError(f"eta must be positive, got {eta}")
    tail, m_tail, g_tail = _tail_norms(u, R)
    lhs = float(
        np.sum(
            (u.grid.weight_b * np.abs(u.values) ** (2.0 * p.sigma + 2.0) * u.grid.weights)[tail]
        )
    )
    expo = 2.0 * (p.sigma * (p.dim - 1) + p.b) / (2.0 - p.sigma)
    rhs = eta * g_tail + young_constant(p.sigma, eta) * R ** (-expo) * m_tail ** (
        (p.sigma + 2.0) / (2.0 - p.sigma)
    )
    return lhs - rhs


def check_critical_gn(u: Field) -> float:
    """Ratio potential / (|grad u|^2 ||u||_{sigma_c}^{2 sigma}); finite and
    bounded across a corpus, with no paper-quantified constant."""
    p = u.params
    if not p.intercritical:
        raise ValidationError("critical-norm bound applies to intercritical parameters")
    if p.dim < 2:
        raise ValidationError("critical-norm bound needs N >= 2")
    m = fn.mass(u)
    if m <= 0:
        raise ValidationError("zero field")
    return fn.potential(u) / (
        fn.grad_norm_sq(u) * fn.lp_norm(u, p.sigma_c) ** (2.0 * p.sigma)
    )


# ---------------------------------------------------------------------------
# corpus-driven suite


def _scaled_to_mass(v: Field, target: float) -> Field:
    m = fn.mass(v)
    return v.with_values(v.values * math.sqrt(target / m))


def _run_signed(name, trials, make_case, scale_fn):
    worst = -math.inf
    witness = None
    count = 0
    for i in range(trials):
        raw, scale, cand = make_case(i)
        rel = raw / scale if scale > 0 else raw
        count += 1
        if rel > worst:
            worst = rel
            witness = cand if rel > -1e-10 else None
    return InequalityReport(name=name, trials=count, max_violation=worst, witness=witness)


def run_gagliardo_report(params, grid, k_opt_value, trials=1000, seed=DEFAULT_SEED):
    rng = corpus_rng(seed, f"gagliardo/{params.dim}/{params.sigma}/{params.b}")
    a = params.dim * params.sigma + params.b

    def case(i):
        u = random_bump_field(params, grid, rng)
        rhs = k_opt_value * fn.grad_norm_sq(u) ** (a / 2.0) * fn.mass(u) ** (
            (2.0 * params.sigma + 2.0 - a) / 2.0
        )
        return fn.potential(u) - rhs, rhs, u

    return _run_signed("gagliardo", trials, case, None)


def run_banica_report(params, grid, q_mass, trials=1000, seed=DEFAULT_SEED):
    rng = corpus_rng(seed, f"banica/{params.dim}/{params.sigma}/{params.b}")

    def case(i):
        v = random_bump_field(params, grid, rng)
        v = _scaled_to_mass(v, rng.uniform(0.05, 0.95) * q_mass)
        theta = rng.uniform(-1.0, 1.0) * grid.nodes ** 2 + random_bump_field(
            params, grid, rng
        ).values.real
        raw = check_banica(v, theta, q_mass)
        grad_theta = gradient_values(grid, np.asarray(theta, dtype=float))
        scale = 2.0 * abs(fn.energy(v)) * float(
            np.sum(np.abs(v.values) ** 2 * grad_theta ** 2 * grid.weights)
        )
        return raw, scale, v

    return _run_signed("banica", trials, case, None)


def run_strauss_report(params, grid, trials=500, radii=(0.5, 1.0, 2.0, 4.0, 6.0), seed=DEFAULT_SEED):
    rng = corpus_rng(seed, f"strauss/{params.dim}/{params.sigma}/{params.b}")
    reports = []

    def case_for(Rv):
        def case(i):
            u = random_bump_field(params, grid, rng)
            raw = check_strauss(u, Rv)
            tail, m_tail, g_tail = _tail_norms(u, Rv)
            rhs = Rv ** (-(params.dim - 1) / 2.0) * m_tail ** 0.25 * g_tail ** 0.25
            return raw, max(rhs, 1e-300), u
        return case

    worst = -math.inf
    witness = None
    total = 0
    for Rv in radii:
        rep = _run_signed("strauss", trials // len(radii) or 1, case_for(Rv), None)
        total += rep.trials
        if rep.max_violation > worst:
            worst, witness = rep.max_violation, rep.witness
    return InequalityReport("strauss", total, worst, witness)


def run_radial_gn_report(params, grid, trials=200, etas=(1e-2, 1e-1, 1.0), R=1.0, seed=DEFAULT_SEED):
    rng = corpus_rng(seed, f"radial_gn/{params.dim}/{params.sigma}/{params.b}")
    worst = -math.inf
    witness = None
    total = 0
    for eta in etas:
        for i in range(trials // len(etas) or 1):
            u = random_bump_field(params, grid, rng)
            raw = check_radial_gn(u, R, eta)
            tail, m_tail, g_tail = _tail_norms(u, R)
            expo = 2.0 * (params.sigma * (params.dim - 1) + params.b) / (2.0 - params.sigma)
            rhs = eta * g_tail + young_constant(params.sigma, eta) * R ** (-expo) * m_tail ** (
                (params.sigma + 2.0) / (2.0 - params.sigma)
            )
            rel = raw / rhs if rhs > 0 else raw
            total += 1
            if rel > worst:
                worst = rel
                witness = u if rel > -1e-10 else None
    return InequalityReport("radial_gn", total, worst, witness)


def run_critical_gn_report(params, grid, q_reference: float, trials=1000, seed=DEFAULT_SEED):
    """Boundedness report: empirical sup of the critical-norm ratio over the
    corpus, referenced to its value at the ground state."""
    rng = corpus_rng(seed, f"critical_gn/{params.dim}/{params.sigma}/{params.b}")
    sup_ratio = 0.0
    for _ in range(trials):
        u = random_bump_field(params, grid, rng)
        sup_ratio = max(sup_ratio, check_critical_gn(u))
    return InequalityReport(
        "critical_gn",
        trials,
        max_violation=-1.0,  # boundedness report, not a sign check
        extra={"sup_ratio": sup_ratio, "q_reference": q_reference,
               "sup_over_reference": sup_ratio / q_reference},
    )


__all__ = [
    "DEFAULT_SEED", "corpus_rng", "random_bump_field", "InequalityReport",
    "check_gagliardo", "check_banica", "check_strauss", "check_radial_gn",
    "check_critical_gn", "young_constant",
    "run_gagliardo_report", "run_banica_report", "run_strauss_report",
    "run_radial_gn_report", "run_critical_gn_report",
]
