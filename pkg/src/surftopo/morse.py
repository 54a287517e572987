"""Critical points, Morse indices and level sets of scalar fields on charts."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .errors import DegeneratePoint, InternalInvariantViolation, NotMorse
from .fields import ScalarField, SurfaceChart, central_gradient, central_hessian


@dataclass(frozen=True)
class SolverOptions:
    """Numerical settings.  Steps and distances are fractions of the chart
    span; ``tol_grad`` is relative to the field scale and ``tol_degenerate``
    to the largest eigenvalue magnitude."""

    grid: int = 64
    grad_step: float = 1e-5
    hess_step: float = 1e-4
    tol_grad: float = 1e-8
    tol_merge: float = 1e-5
    tol_degenerate: float = 1e-6
    probe_radius: float = 1e-3
    max_iter: int = 40
    max_halvings: int = 30
    backend: str | None = None


@dataclass(frozen=True)
class CriticalPoint:
    position: tuple[float, float]
    value: float
    gradient_norm: float
    hessian: tuple[tuple[float, float], tuple[float, float]]
    eigenvalues: tuple[float, float]
    index: int | None
    chart: str = "main"

    @property
    def degenerate(self) -> bool:
        return self.index is None

    @property
    def kind(self) -> str:
        if self.index is None:
            return "degenerate"
        return ("minimum", "saddle", "maximum")[self.index]

    def to_dict(self) -> dict:
        return {
            "chart": self.chart,
            "position": [float(x) for x in self.position],
            "value": float(self.value),
            "gradient_norm": float(self.gradient_norm),
            "hessian": [[float(x) for x in row] for row in self.hessian],
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "index": self.index,
            "kind": self.kind,
        }


@dataclass(frozen=True)
class MorseReport:
    field_name: str
    critical_points: tuple[CriticalPoint, ...]
    closed_manifold: bool = False

    @property
    def degenerate_points(self) -> tuple[CriticalPoint, ...]:
        return tuple(p for p in self.critical_points if p.degenerate)

    @property
    def is_morse(self) -> bool:
        return not self.degenerate_points

    @property
    def indices(self) -> tuple[int | None, ...]:
        return tuple(p.index for p in self.critical_points)

    def to_dict(self) -> dict:
        return {
            "field": self.field_name,
            "closed_manifold": self.closed_manifold,
            "is_morse": self.is_morse,
            "n_critical_points": len(self.critical_points),
            "indices": list(self.indices),
            "critical_points": [p.to_dict() for p in self.critical_points],
        }


# ----------------------------------------------------------------- Newton

def newton_zeros(F: Callable, J: Callable, chart: SurfaceChart, scale: float,
                 opts: SolverOptions, seeds=None) -> tuple[np.ndarray, np.ndarray]:
    """Damped Newton on ``F = 0`` from every grid seed, vectorized over seeds.

    A trial step is halved until ``|F|`` decreases; seeds where no halving
    helps are frozen.  Returns distinct zeros (after merging within
    ``tol_merge``) and their residual norms, sorted lexicographically.
    """
    x = chart.grid(opts.grid) if seeds is None else np.array(seeds, dtype=float)
    max_step = 0.1 * chart.span
    g = F(x)
    gn = np.linalg.norm(g, axis=-1)
    active = np.isfinite(gn)
    for _ in range(opts.max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        step = -np.einsum("nij,nj->ni", np.linalg.pinv(J(x[idx])), g[idx])
        # trust region: FD derivatives vanish spuriously at huge coordinates
        length = np.linalg.norm(step, axis=-1)
        step *= np.minimum(1.0, max_step / np.where(length > 0, length, 1.0))[:, None]
        alpha = np.ones(idx.size)
        pending = np.isfinite(step).all(-1)
        accepted = np.zeros(idx.size, dtype=bool)
        for _ in range(opts.max_halvings):
            if not pending.any():
                break
            sel = np.flatnonzero(pending)
            xt = x[idx[sel]] + alpha[sel, None] * step[sel]
            gt = F(xt)
            gtn = np.linalg.norm(gt, axis=-1)
            ok = gtn < gn[idx[sel]]
            good = sel[ok]
            x[idx[good]] = xt[ok]
            g[idx[good]] = gt[ok]
            gn[idx[good]] = gtn[ok]
            accepted[good] = True
            pending[good] = False
            alpha[sel[~ok]] *= 0.5
        active[idx[~accepted]] = False

    merge = opts.tol_merge * chart.span
    keep = (gn <= opts.tol_grad * scale) & chart.contains(x, merge)
    x = chart.wrap(x[keep], snap=merge)
    gn = np.linalg.norm(F(x), axis=-1)
    x = x[gn <= opts.tol_grad * scale]
    gn = gn[gn <= opts.tol_grad * scale]
    if x.shape[0] == 0:
        return np.zeros((0, 2)), np.zeros(0)
    labels = _kernels.cluster_points(x, chart.periods, merge, backend=opts.backend)
    reps = []
    for lab in np.unique(labels):
        members = np.flatnonzero(labels == lab)
        reps.append(members[np.argmin(gn[members])])
    reps = np.array(reps)
    key = np.round(x[reps] / merge).astype(np.int64)
    order = np.lexsort((key[:, 1], key[:, 0]))
    reps = reps[order]
    return x[reps], gn[reps]


# ------------------------------------------------------------ classification

def _eigen(H):
    w, vecs = np.linalg.eigh(np.asarray(H, dtype=float))
    return w, vecs


def hessian(f: ScalarField, p, opts: SolverOptions | None = None, rel_step=None) -> np.ndarray:
    opts = opts or SolverOptions()
    step = opts.hess_step if rel_step is None else rel_step
    return central_hessian(f, np.asarray(p, dtype=float), step)


def is_degenerate_at(f_grad: Callable, p, H, chart: SurfaceChart, opts: SolverOptions) -> bool:
    """Degeneracy test for a zero ``p`` of ``f_grad`` with Jacobian ``H``.

    Besides the relative eigenvalue threshold, the linear model must explain
    the field at the probe radius: along each eigenvector the one-sided
    secant slopes must carry the eigenvalue's sign on both sides.  A zero
    located only to within the derivative noise of a degenerate point (e.g.
    ``u^3``) fails the second test even when its computed eigenvalue is not
    tiny.
    """
    w, vecs = _eigen(H)
    big = np.max(np.abs(w))
    if big == 0 or np.min(np.abs(w)) <= opts.tol_degenerate * big:
        return True
    r = opts.probe_radius * float(chart.spans.min())
    p = np.asarray(p, dtype=float)
    for lam, e in zip(w, vecs.T):
        plus = f_grad(p + r * e) @ e / r
        minus = -(f_grad(p - r * e) @ e) / r
        if not (np.sign(plus) == np.sign(minus) == np.sign(lam)):
            return True
    return False


def _critical_point(f: ScalarField, p, gn, opts, chart_name="main") -> CriticalPoint:
    H = hessian(f, p, opts)
    w, _ = _eigen(H)
    grad = lambda q: central_gradient(f, q, opts.grad_step)
    degenerate = is_degenerate_at(grad, p, H, f.chart, opts)
    index = None if degenerate else int(np.sum(w < 0))
    return CriticalPoint(
        position=(float(p[0]), float(p[1])),
        value=float(f(p)),
        gradient_norm=float(gn),
        hessian=tuple(tuple(float(x) for x in row) for row in H),
        eigenvalues=(float(w[0]), float(w[1])),
        index=index,
        chart=chart_name,
    )


def find_critical_points(f: ScalarField, opts: SolverOptions | None = None,
                         chart_name: str = "main") -> list[CriticalPoint]:
    opts = opts or SolverOptions()
    F = lambda x: central_gradient(f, x, opts.grad_step)
    J = lambda x: central_hessian(f, x, opts.hess_step)
    pts, gns = newton_zeros(F, J, f.chart, f.scale, opts)
    return [_critical_point(f, p, gn, opts, chart_name) for p, gn in zip(pts, gns)]


def morse_index(cp: CriticalPoint) -> int:
    if cp.index is None:
        raise DegeneratePoint(f"critical point at {cp.position} is degenerate "
                              f"(eigenvalues {cp.eigenvalues})")
    return cp.index


def is_morse(f, opts: SolverOptions | None = None) -> MorseReport:
    """Critical points with indices; ``is_morse`` iff none is degenerate."""
    if isinstance(f, SphereModel):
        return f.morse_report(opts)
    pts = find_critical_points(f, opts)
    return MorseReport(f.name, tuple(pts), f.chart.is_closed)


def reeb_sphere_check(report: MorseReport) -> bool:
    """Exactly two critical points of a Morse function (min and max)."""
    if not report.is_morse:
        raise NotMorse(f"{len(report.degenerate_points)} degenerate critical points")
    if len(report.critical_points) != 2:
        return False
    idx = sorted(report.indices)
    if idx != [0, 2]:
        if report.closed_manifold:
            raise InternalInvariantViolation(f"two critical points with indices {idx} on a closed surface")
        return False
    return True


def euler_from_indices(report: MorseReport) -> int:
    if not report.is_morse:
        raise NotMorse(f"{len(report.degenerate_points)} degenerate critical points")
    return sum((-1) ** p.index for p in report.critical_points)


def sample_grid(f: ScalarField, resolution: int) -> np.ndarray:
    gu, gv = f.chart.grid_axes(resolution)
    U, V = np.meshgrid(gu, gv, indexing="ij")
    return np.asarray(f.func(U, V), dtype=float)


def level_component_count(f: ScalarField, y: float, resolution: int = 256,
                          backend: str | None = None) -> int:
    """Connected components of ``f = y`` by marching squares on a
    ``resolution x resolution`` sample grid (periodic axes stitched)."""
    if resolution < 16:
        raise ValueError("resolution must be at least 16")
    grid = sample_grid(f, resolution)
    return _kernels.level_components(grid, y, f.chart.periodic_u, f.chart.periodic_v, backend)


# ------------------------------------------------------------------ sphere

@dataclass(frozen=True)
class SphereModel:
    """The round sphere covered by a spherical-coordinate chart and two polar caps.

    ``height(x, y, z)`` is a function on R^3 restricted to the unit sphere.
    The main chart is ``u`` in [0, 2pi) (periodic), ``v`` in [eps, pi - eps];
    each cap is a Cartesian ``(x, y)`` chart over the hemisphere near a pole.
    Cap critical points count only inside the polar angle ``eps``.
    """

    height: Callable
    eps: float = 0.05
    name: str = "sphere"
    main: ScalarField = field(init=False)
    caps: tuple[ScalarField, ScalarField] = field(init=False)

    def __post_init__(self):
        F, eps = self.height, self.eps
        chart = SurfaceChart((0.0, 2 * math.pi), (eps, math.pi - eps), periodic_u=True)
        main = ScalarField(
            lambda u, v: F(np.sin(v) * np.cos(u), np.sin(v) * np.sin(u), np.cos(v)),
            chart, f"{self.name}:main")
        w = 2 * math.sin(eps)
        cap_chart = SurfaceChart.square(-w, w)

        def cap(sign):
            return lambda x, y: F(x, y, sign * np.sqrt(np.clip(1 - x * x - y * y, 0, None)))

        caps = (ScalarField(cap(1.0), cap_chart, f"{self.name}:north"),
                ScalarField(cap(-1.0), cap_chart, f"{self.name}:south"))
        object.__setattr__(self, "main", main)
        object.__setattr__(self, "caps", caps)

    def charts(self):
        return (("main", self.main), ("north", self.caps[0]), ("south", self.caps[1]))

    def in_domain(self, chart_name: str, p) -> bool:
        if chart_name == "main":
            return bool(self.main.chart.contains(np.asarray(p)))
        return float(np.hypot(*p)) < math.sin(self.eps)

    def critical_points(self, opts: SolverOptions | None = None) -> list[CriticalPoint]:
        out = []
        for name, f in self.charts():
            out += [cp for cp in find_critical_points(f, opts, name)
                    if self.in_domain(name, cp.position)]
        return out

    def morse_report(self, opts: SolverOptions | None = None) -> MorseReport:
        return MorseReport(self.name, tuple(self.critical_points(opts)), closed_manifold=True)


def sphere_height_model(eps: float = 0.05) -> SphereModel:
    """Height function z on the round sphere: one minimum, one maximum."""
    return SphereModel(lambda x, y, z: z + 0 * x, eps, "sphere-height")
