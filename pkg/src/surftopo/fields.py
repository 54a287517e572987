"""Rectangular charts with optional periodic axes, and fields on them.

Derivatives are central differences with steps relative to each axis span.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ChartError
from .expr import Expression


@dataclass(frozen=True)
class SurfaceChart:
    u_range: tuple[float, float]
    v_range: tuple[float, float]
    periodic_u: bool = False
    periodic_v: bool = False

    def __post_init__(self):
        for name in ("u_range", "v_range"):
            lo, hi = (float(x) for x in getattr(self, name))
            if not (np.isfinite(lo) and np.isfinite(hi) and hi > lo):
                raise ChartError(f"{name} must be a nonempty finite interval, got {(lo, hi)}")
            object.__setattr__(self, name, (lo, hi))

    @classmethod
    def square(cls, lo, hi, periodic=False):
        return cls((lo, hi), (lo, hi), periodic, periodic)

    @property
    def lo(self) -> np.ndarray:
        return np.array([self.u_range[0], self.v_range[0]])

    @property
    def hi(self) -> np.ndarray:
        return np.array([self.u_range[1], self.v_range[1]])

    @property
    def spans(self) -> np.ndarray:
        return self.hi - self.lo

    @property
    def span(self) -> float:
        return float(self.spans.max())

    @property
    def periodic(self) -> np.ndarray:
        return np.array([self.periodic_u, self.periodic_v])

    @property
    def periods(self) -> np.ndarray:
        """Period per axis, 0 for non-periodic axes."""
        return np.where(self.periodic, self.spans, 0.0)

    @property
    def is_closed(self) -> bool:
        return bool(self.periodic_u and self.periodic_v)

    def wrap(self, pts, snap=0.0) -> np.ndarray:
        """Reduce periodic coordinates into ``[lo - snap, hi - snap)``."""
        pts = np.array(pts, dtype=float)
        for k in range(2):
            if self.periodic[k]:
                w = np.mod(pts[..., k] - self.lo[k], self.spans[k])
                w = np.where(w > self.spans[k] - snap, w - self.spans[k], w)
                pts[..., k] = self.lo[k] + w
        return pts

    def displacement(self, a, b) -> np.ndarray:
        """Shortest ``b - a`` respecting periodic axes."""
        d = np.asarray(b, dtype=float) - np.asarray(a, dtype=float)
        for k in range(2):
            if self.periodic[k]:
                p = self.spans[k]
                d[..., k] = d[..., k] - p * np.round(d[..., k] / p)
        return d

    def distance(self, a, b) -> np.ndarray:
        return np.linalg.norm(self.displacement(a, b), axis=-1)

    def contains(self, pts, tol=0.0) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        ok = np.ones(pts.shape[:-1], dtype=bool)
        for k in range(2):
            if not self.periodic[k]:
                ok &= (pts[..., k] >= self.lo[k] - tol) & (pts[..., k] <= self.hi[k] + tol)
        return ok

    def grid_axes(self, n: int):
        """Sample nodes per axis: periodic axes omit the duplicate endpoint."""
        axes = []
        for k in range(2):
            endpoint = not self.periodic[k]
            axes.append(np.linspace(self.lo[k], self.hi[k], n, endpoint=endpoint))
        return axes

    def grid(self, n: int) -> np.ndarray:
        gu, gv = self.grid_axes(n)
        U, V = np.meshgrid(gu, gv, indexing="ij")
        return np.stack([U.ravel(), V.ravel()], -1)

    def describe(self) -> dict:
        return {"u_range": list(self.u_range), "v_range": list(self.v_range),
                "periodic_u": self.periodic_u, "periodic_v": self.periodic_v}


def _sample_check(values, what):
    if not np.all(np.isfinite(values)):
        raise ChartError(f"{what} is not finite on the chart")


@dataclass(frozen=True)
class ScalarField:
    """Deterministic evaluator ``f(u, v)`` on a chart.

    ``func`` must accept numpy arrays and broadcast elementwise.
    """

    func: Callable
    chart: SurfaceChart
    name: str = "f"
    periodic_rtol: float = 1e-4
    scale: float = field(init=False)

    def __post_init__(self):
        U = self.chart.grid(17)
        vals = np.asarray(self.func(U[:, 0], U[:, 1]), dtype=float)
        _sample_check(vals, f"field {self.name}")
        scale = float(np.max(np.abs(vals))) or 1.0
        object.__setattr__(self, "scale", scale)
        t = np.linspace(0.0, 1.0, 13)
        lo, hi = self.chart.lo, self.chart.hi
        for k in range(2):
            if not self.chart.periodic[k]:
                continue
            other = lo[1 - k] + t * self.chart.spans[1 - k]
            a = np.empty((len(t), 2))
            b = np.empty((len(t), 2))
            a[:, k], b[:, k] = lo[k], hi[k]
            a[:, 1 - k] = b[:, 1 - k] = other
            gap = np.max(np.abs(self(a) - self(b)))
            if gap > self.periodic_rtol * scale:
                raise ChartError(f"field {self.name} differs by {gap:.3g} across the "
                                 f"identified {'uv'[k]}-edges")

    def __call__(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return np.asarray(self.func(pts[..., 0], pts[..., 1]), dtype=float)

    def gradient(self, pts, rel_step=1e-5) -> np.ndarray:
        return central_gradient(self, pts, rel_step)

    def hessian(self, pts, rel_step=1e-4) -> np.ndarray:
        return central_hessian(self, pts, rel_step)


def central_gradient(f, pts, rel_step=1e-5) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    h = rel_step * f.chart.spans
    out = np.empty(pts.shape)
    for k in range(2):
        e = np.zeros(2)
        e[k] = h[k]
        out[..., k] = (f(pts + e) - f(pts - e)) / (2 * h[k])
    return out


def central_hessian(f, pts, rel_step=1e-4) -> np.ndarray:
    """Second differences; symmetric by construction."""
    pts = np.asarray(pts, dtype=float)
    hu, hv = rel_step * f.chart.spans
    eu, ev = np.array([hu, 0.0]), np.array([0.0, hv])
    f0 = f(pts)
    H = np.empty(pts.shape[:-1] + (2, 2))
    H[..., 0, 0] = (f(pts + eu) - 2 * f0 + f(pts - eu)) / hu ** 2
    H[..., 1, 1] = (f(pts + ev) - 2 * f0 + f(pts - ev)) / hv ** 2
    mixed = (f(pts + eu + ev) - f(pts + eu - ev) - f(pts - eu + ev) + f(pts - eu - ev)) / (4 * hu * hv)
    H[..., 0, 1] = H[..., 1, 0] = mixed
    return 0.5 * (H + np.swapaxes(H, -1, -2))


@dataclass(frozen=True)
class VectorField:
    """Field ``(u, v) -> (X1, X2)`` on a chart.

    ``potential`` is set when the field is the gradient of a scalar field.
    """

    func: Callable
    chart: SurfaceChart
    name: str = "X"
    potential: ScalarField | None = None
    scale: float = field(init=False)

    def __post_init__(self):
        U = self.chart.grid(17)
        vals = self(U)
        _sample_check(vals, f"vector field {self.name}")
        object.__setattr__(self, "scale", float(np.max(np.linalg.norm(vals, axis=-1))) or 1.0)

    def __call__(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        x1, x2 = self.func(pts[..., 0], pts[..., 1])
        shape = pts.shape[:-1]
        return np.stack([np.broadcast_to(np.asarray(x1, float), shape),
                         np.broadcast_to(np.asarray(x2, float), shape)], -1)

    def jacobian(self, pts, rel_step=1e-4) -> np.ndarray:
        """``J[..., i, j] = dX_i / dx_j`` by central differences."""
        pts = np.asarray(pts, dtype=float)
        h = rel_step * self.chart.spans
        J = np.empty(pts.shape[:-1] + (2, 2))
        for j in range(2):
            e = np.zeros(2)
            e[j] = h[j]
            J[..., :, j] = (self(pts + e) - self(pts - e)) / (2 * h[j])
        return J

    def reversed(self) -> "VectorField":
        """The same field with time reversed."""
        fn = self.func

        def neg(u, v):
            x1, x2 = fn(u, v)
            return -np.asarray(x1, float), -np.asarray(x2, float)

        pot = None
        if self.potential is not None:
            p = self.potential
            pot = ScalarField(lambda u, v: -p.func(u, v), p.chart, f"-{p.name}")
        return VectorField(neg, self.chart, f"-{self.name}", pot)


def field_from_expression(text: str, chart: SurfaceChart) -> ScalarField:
    return ScalarField(Expression(text), chart, text)


def vector_field_from_expressions(x1: str, x2: str, chart: SurfaceChart) -> VectorField:
    e1, e2 = Expression(x1), Expression(x2)
    return VectorField(lambda u, v: (e1(u, v), e2(u, v)), chart, f"{{{x1}, {x2}}}")
