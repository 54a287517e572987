"""Singular points, trajectories and separatrices of planar vector fields on charts.

Gradient fields flow uphill, so minima are sources and maxima are sinks.
"""
from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import NotASaddle, NotMorseSmale, TooLarge
from .fields import ScalarField, VectorField, central_gradient
from .morse import SolverOptions, SphereModel, is_degenerate_at, newton_zeros

SOURCE, SINK, SADDLE = "Source", "Sink", "Saddle"
DEGENERATE, NON_HYPERBOLIC = "Degenerate", "NonHyperbolic"

REACHED_SINGULAR = "ReachedSingular"
LEFT_CHART = "LeftChart"
STEP_LIMIT = "StepLimit"
CLOSED_ORBIT = "ClosedOrbit"


@dataclass(frozen=True)
class FlowOptions:
    """``dt``, ``tol_capture`` and ``separatrix_eps`` are fractions of the chart span."""

    dt: float = 1e-3
    max_steps: int = 1_000_000
    tol_capture: float = 1e-3
    separatrix_eps: float = 1e-4
    probe_grid: int = 6
    min_anchor_step: int = 16
    solver: SolverOptions = field(default_factory=SolverOptions)


@dataclass(frozen=True)
class SingularPoint:
    position: tuple[float, float]
    jacobian: tuple[tuple[float, float], tuple[float, float]]
    eigenvalues: tuple[complex, complex]
    kind: str
    index: int | None = None
    chart: str = "main"

    @property
    def label(self) -> str:
        return self.kind if self.index is None else f"{self.kind}/{self.index}"

    def to_dict(self) -> dict:
        return {
            "chart": self.chart,
            "position": [float(x) for x in self.position],
            "kind": self.kind,
            "index": self.index,
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "jacobian": [[float(x) for x in row] for row in self.jacobian],
        }


def gradient_field(f: ScalarField, rel_step: float = 1e-5) -> VectorField:
    """Flat-metric gradient of ``f`` by central differences."""

    def grad(u, v):
        pts = np.stack(np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float)), -1)
        g = central_gradient(f, pts, rel_step)
        return g[..., 0], g[..., 1]

    return VectorField(grad, f.chart, f"grad {f.name}", potential=f)


def classify_jacobian(J, tol_rel: float) -> str:
    lam = np.linalg.eigvals(np.asarray(J, dtype=float))
    big = np.max(np.abs(lam))
    tol = tol_rel * big
    if big == 0 or np.min(np.abs(lam)) <= tol:
        return DEGENERATE
    re = lam.real
    if np.any(np.abs(re) <= tol):
        return NON_HYPERBOLIC
    if np.all(re > 0):
        return SOURCE
    if np.all(re < 0):
        return SINK
    return SADDLE


def _singular_point(X: VectorField, p, opts: FlowOptions, chart_name="main") -> SingularPoint:
    s = opts.solver
    J = X.jacobian(p, s.hess_step)
    lam = np.linalg.eigvals(J)
    lam = lam[np.lexsort((lam.imag, lam.real))]
    kind = classify_jacobian(J, s.tol_degenerate)
    index = None
    if X.potential is not None:
        Js = 0.5 * (J + J.T)
        if kind in (SOURCE, SINK, SADDLE) and is_degenerate_at(X, p, Js, X.chart, s):
            kind = DEGENERATE
        if kind != DEGENERATE:
            index = int(np.sum(np.linalg.eigvalsh(Js) < 0))
    return SingularPoint((float(p[0]), float(p[1])),
                         tuple(tuple(float(x) for x in row) for row in J),
                         (complex(lam[0]), complex(lam[1])), kind, index, chart_name)


def find_singular_points(X: VectorField, opts: FlowOptions | None = None) -> list[SingularPoint]:
    """Zeros of ``X`` by damped Newton from grid seeds, classified by the
    eigenvalues of the finite-difference Jacobian."""
    opts = opts or FlowOptions()
    s = opts.solver
    pts, _ = newton_zeros(X, lambda x: X.jacobian(x, s.hess_step), X.chart, X.scale, s)
    return [_singular_point(X, p, opts) for p in pts]


# -------------------------------------------------------------- integration

@dataclass
class Trajectory:
    samples: np.ndarray  # rows (t, u, v); coordinates are not wrapped
    termination: str
    singular: int | None = None
    direction: str = "forward"

    @property
    def end(self) -> np.ndarray:
        return self.samples[-1, 1:]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "u", "v"])
            for row in self.samples:
                w.writerow([repr(float(x)) for x in row])


def _rk4(X, x, h):
    k1 = X(x)
    k2 = X(x + 0.5 * h[:, None] * k1)
    k3 = X(x + 0.5 * h[:, None] * k2)
    k4 = X(x + h[:, None] * k3)
    return x + (h[:, None] / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate_batch(X: VectorField, seeds, directions, opts: FlowOptions | None = None,
                    singular_points=None, record: bool = True,
                    max_steps: int | None = None) -> list[Trajectory]:
    """Fixed-step RK4 for many seeds at once.

    ``directions`` holds ``+1`` (forward) or ``-1`` (backward) per seed.  A
    singular point captures a trajectory only after the trajectory has been
    outside its capture ball, so separatrices launched next to a saddle are
    not captured by that saddle immediately.  Closed orbits are detected by
    returning near an anchor sample (re-anchored at step counts that are
    powers of two) while moving in a consistent direction.
    """
    opts = opts or FlowOptions()
    chart = X.chart
    seeds = np.atleast_2d(np.asarray(seeds, dtype=float)).copy()
    n = len(seeds)
    sign = np.broadcast_to(np.asarray(directions, dtype=float), (n,)).copy()
    if not np.all(chart.contains(seeds)):
        raise ValueError("seed outside chart")
    if singular_points is None:
        singular_points = find_singular_points(X, opts)
    sing = np.array([p.position for p in singular_points], dtype=float).reshape(-1, 2)
    dt = opts.dt * chart.span
    r_cap = opts.tol_capture * chart.span
    max_steps = opts.max_steps if max_steps is None else max_steps

    def dist_to_sing(x):
        if len(sing) == 0:
            return np.zeros((len(x), 0))
        return chart.distance(x[:, None, :], sing[None, :, :])

    x = seeds
    armed = dist_to_sing(x) > r_cap
    anchor = x.copy()
    anchor_vel = X(x) * sign[:, None]
    speed0 = np.linalg.norm(anchor_vel, axis=-1)
    r_ret = np.maximum(r_cap, dt * speed0)
    left_anchor = np.zeros(n, dtype=bool)
    term = np.full(n, STEP_LIMIT, dtype=object)
    hit = np.full(n, -1)
    active = np.ones(n, dtype=bool)
    steps_done = np.zeros(n, dtype=np.int64)
    history = [x.copy()] if record else None
    first, last = x.copy(), x.copy()

    # a seed already at a singular point never moves
    if len(sing):
        at = dist_to_sing(x) <= 1e-12 * chart.span
        for i in np.flatnonzero(at.any(1)):
            active[i] = False
            term[i], hit[i] = REACHED_SINGULAR, int(np.argmax(at[i]))

    step = 0
    while active.any() and step < max_steps:
        step += 1
        idx = np.flatnonzero(active)
        xn = x.copy()
        xn[idx] = _rk4(X, x[idx], sign[idx] * dt)
        x = xn
        steps_done[idx] = step
        if record:
            history.append(x.copy())
        last[idx] = x[idx]
        xa = x[idx]

        bad = ~np.isfinite(xa).all(-1)
        out = ~chart.contains(xa) | bad
        for j in np.flatnonzero(out):
            term[idx[j]] = LEFT_CHART
            active[idx[j]] = False

        if len(sing):
            d = dist_to_sing(xa)
            inside = (d <= r_cap) & armed[idx]
            armed[idx] |= d > r_cap
            for j in np.flatnonzero(inside.any(1) & ~out):
                i = idx[j]
                term[i], hit[i] = REACHED_SINGULAR, int(np.argmin(np.where(inside[j], d[j], np.inf)))
                active[i] = False

        still = active[idx]
        if still.any():
            ii = idx[still]
            da = chart.distance(x[ii], anchor[ii])
            left_anchor[ii] |= da > 2 * r_ret[ii]
            back = left_anchor[ii] & (da <= r_ret[ii])
            if back.any():
                vel = X(x[ii[back]]) * sign[ii[back], None]
                same = np.einsum("ij,ij->i", vel, anchor_vel[ii[back]]) > 0
                for i in ii[back][same]:
                    term[i] = CLOSED_ORBIT
                    active[i] = False
            if step >= opts.min_anchor_step and (step & (step - 1)) == 0:
                ii = np.flatnonzero(active)
                anchor[ii] = x[ii]
                anchor_vel[ii] = X(x[ii]) * sign[ii, None]
                r_ret[ii] = np.maximum(r_cap, dt * np.linalg.norm(anchor_vel[ii], axis=-1))
                left_anchor[ii] = False

    trajectories = []
    for i in range(n):
        m = steps_done[i]
        if record:
            pts = np.array([h[i] for h in history[: m + 1]])
        else:
            pts = np.array([first[i], last[i]]) if m else first[i][None]
        t = np.arange(len(pts), dtype=float) * dt if record else np.array([0.0, m * dt])[: len(pts)]
        samples = np.column_stack([t, pts])
        trajectories.append(Trajectory(samples, term[i], int(hit[i]) if hit[i] >= 0 else None,
                                       "forward" if sign[i] > 0 else "backward"))
    return trajectories


def integrate_trajectory(X: VectorField, seed, direction: str = "forward",
                         opts: FlowOptions | None = None, singular_points=None,
                         max_steps: int | None = None) -> Trajectory:
    if direction not in ("forward", "backward"):
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")
    sign = 1.0 if direction == "forward" else -1.0
    return integrate_batch(X, [seed], [sign], opts, singular_points, max_steps=max_steps)[0]


# -------------------------------------------------------------- separatrices

@dataclass
class Separatrix:
    saddle: int
    role: str  # "unstable" (integrated forward) or "stable" (backward)
    slot: int
    trajectory: Trajectory


def _separatrix_seeds(X: VectorField, saddle: SingularPoint, opts: FlowOptions):
    if saddle.kind != SADDLE:
        raise NotASaddle(f"{saddle.kind} at {saddle.position}")
    J = np.array(saddle.jacobian)
    lam, vecs = np.linalg.eig(J)
    lam, vecs = lam.real, vecs.real
    eps = opts.separatrix_eps * X.chart.span
    p = np.array(saddle.position)
    out = []
    for role, k in (("unstable", int(np.argmax(lam))), ("stable", int(np.argmin(lam)))):
        e = vecs[:, k] / np.linalg.norm(vecs[:, k])
        # fixed orientation so both slots are reproducible
        if e[0] < 0 or (e[0] == 0 and e[1] < 0):
            e = -e
        for slot, s in ((1, 1.0), (2, -1.0)):
            out.append((role, slot, X.chart.wrap(p + s * eps * e),
                        1.0 if role == "unstable" else -1.0))
    return out


def separatrices(X: VectorField, saddle: SingularPoint, opts: FlowOptions | None = None,
                 singular_points=None, saddle_id: int = -1) -> list[Separatrix]:
    opts = opts or FlowOptions()
    seeds = _separatrix_seeds(X, saddle, opts)
    trajs = integrate_batch(X, [s[2] for s in seeds], [s[3] for s in seeds], opts, singular_points)
    return [Separatrix(saddle_id, role, slot, t) for (role, slot, _, _), t in zip(seeds, trajs)]


def _all_separatrices(X, points, opts) -> list[Separatrix]:
    seeds, owners = [], []
    for i, p in enumerate(points):
        if p.kind == SADDLE:
            for s in _separatrix_seeds(X, p, opts):
                seeds.append(s)
                owners.append(i)
    if not seeds:
        return []
    trajs = integrate_batch(X, [s[2] for s in seeds], [s[3] for s in seeds], opts, points)
    return [Separatrix(i, role, slot, t) for i, (role, slot, _, _), t in zip(owners, seeds, trajs)]


# ------------------------------------------------------------- Morse-Smale

@dataclass
class MSVerdict:
    is_morse_smale: bool
    nondegenerate: bool
    closed_manifold: bool
    closed_orbits: int
    saddle_connections: list[tuple[int, int, str, int]]
    unterminated: int
    left_chart: int
    singular_points: list[SingularPoint]
    separatrices: list[Separatrix] = field(repr=False)

    @property
    def caveat(self) -> str | None:
        return None if self.closed_manifold else "NotClosedManifold"

    def to_dict(self) -> dict:
        return {
            "is_morse_smale": self.is_morse_smale,
            "caveat": self.caveat,
            "nondegenerate": self.nondegenerate,
            "closed_manifold": self.closed_manifold,
            "closed_orbits": self.closed_orbits,
            "unterminated": self.unterminated,
            "left_chart": self.left_chart,
            "saddle_connections": [
                {"from": a, "to": b, "role": role, "slot": slot,
                 "from_position": list(self.singular_points[a].position),
                 "to_position": list(self.singular_points[b].position)}
                for a, b, role, slot in self.saddle_connections],
            "singular_points": [p.to_dict() for p in self.singular_points],
        }


def _probe_seeds(chart, n):
    axes = []
    for k in range(2):
        h = chart.spans[k] / n
        axes.append(chart.lo[k] + h * (np.arange(n) + 0.5))
    U, V = np.meshgrid(*axes, indexing="ij")
    # irrational shift keeps probes off symmetry lines of the field
    shift = np.array([0.1234, 0.0741]) * chart.spans / n
    return np.stack([U.ravel(), V.ravel()], -1) + shift


def morse_smale_check(X: VectorField, opts: FlowOptions | None = None) -> MSVerdict:
    """Gradient-like Morse-Smale test on a chart.

    Every separatrix and probe trajectory must end at a non-degenerate
    singular point, and no separatrix may end at a saddle.  Closed orbits
    are found only heuristically; their absence is not proven.
    """
    opts = opts or FlowOptions()
    points = find_singular_points(X, opts)
    nondeg = all(p.kind in (SOURCE, SINK, SADDLE) for p in points)
    seps = _all_separatrices(X, points, opts)
    probes = _probe_seeds(X.chart, opts.probe_grid)
    ptraj = integrate_batch(X, np.concatenate([probes, probes]),
                            np.r_[np.ones(len(probes)), -np.ones(len(probes))],
                            opts, points, record=False)
    everything = [s.trajectory for s in seps] + ptraj
    closed = sum(t.termination == CLOSED_ORBIT for t in everything)
    unterminated = sum(t.termination == STEP_LIMIT for t in everything)
    left = sum(t.termination == LEFT_CHART for t in everything)
    connections = [(s.saddle, s.trajectory.singular, s.role, s.slot) for s in seps
                   if s.trajectory.termination == REACHED_SINGULAR
                   and points[s.trajectory.singular].kind == SADDLE]
    closed_chart = X.chart.is_closed
    ok = closed_chart and nondeg and not closed and not unterminated and not left and not connections
    return MSVerdict(ok, nondeg, closed_chart, closed, connections, unterminated, left, points, seps)


# ------------------------------------------------------------ graph encoding

@dataclass(frozen=True)
class MorseSmaleGraph:
    """Singular points as labelled nodes; each saddle has one edge per separatrix."""

    nodes: tuple[tuple[int, str, int | None], ...]  # (id, kind, index)
    edges: tuple[tuple[int, int, str, int], ...]  # (saddle, terminal node, role, slot)

    def kind_counts(self) -> Counter:
        return Counter(kind for _, kind, _ in self.nodes)

    def time_reversed(self) -> "MorseSmaleGraph":
        swap = {SOURCE: SINK, SINK: SOURCE}
        role = {"stable": "unstable", "unstable": "stable"}
        nodes = tuple((i, swap.get(k, k), None if idx is None else 2 - idx) for i, k, idx in self.nodes)
        edges = tuple((s, t, role[r], slot) for s, t, r, slot in self.edges)
        return MorseSmaleGraph(nodes, edges)

    def to_text(self) -> str:
        lines = [f"node {i} {k} {'-' if idx is None else idx}" for i, k, idx in self.nodes]
        lines += [f"edge {s} {t} {r} {slot}" for s, t, r, slot in self.edges]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "MorseSmaleGraph":
        nodes, edges = [], []
        for line in text.splitlines():
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "node":
                nodes.append((int(parts[1]), parts[2], None if parts[3] == "-" else int(parts[3])))
            elif parts[0] == "edge":
                edges.append((int(parts[1]), int(parts[2]), parts[3], int(parts[4])))
            else:
                raise ValueError(f"bad graph line {line!r}")
        return cls(tuple(nodes), tuple(edges))

    def to_dot(self) -> str:
        lines = ["digraph morse_smale {"]
        for i, k, idx in self.nodes:
            lines.append(f'  n{i} [label="{k}{"" if idx is None else f" ind={idx}"}"];')
        for s, t, r, slot in self.edges:
            a, b = (s, t) if r == "unstable" else (t, s)
            lines.append(f'  n{a} -> n{b} [label="{r} {slot}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _points_graph(points, seps) -> MorseSmaleGraph:
    nodes = tuple((i, p.kind, p.index) for i, p in enumerate(points))
    edges = tuple((s.saddle, s.trajectory.singular, s.role, s.slot) for s in seps)
    return MorseSmaleGraph(nodes, edges)


def ms_graph(X, opts: FlowOptions | None = None, force: bool = False) -> MorseSmaleGraph:
    """Separatrix graph of a Morse-Smale field (or of a :class:`SphereModel` gradient)."""
    if isinstance(X, SphereModel):
        return _sphere_graph(X, opts)
    verdict = morse_smale_check(X, opts)
    if not verdict.is_morse_smale and not force:
        raise NotMorseSmale(f"field {X.name} is not Morse-Smale: {verdict.to_dict()['caveat'] or ''}"
                            f" connections={len(verdict.saddle_connections)}"
                            f" closed_orbits={verdict.closed_orbits}")
    for s in verdict.separatrices:
        if s.trajectory.termination != REACHED_SINGULAR and not force:
            raise NotMorseSmale(f"separatrix of saddle {s.saddle} ended with {s.trajectory.termination}")
    return _points_graph(verdict.singular_points, verdict.separatrices)


def _sphere_graph(model: SphereModel, opts) -> MorseSmaleGraph:
    opts = opts or FlowOptions()
    points = []
    for cp in model.critical_points(opts.solver):
        if cp.index is None:
            raise NotMorseSmale(f"degenerate critical point on {cp.chart} chart")
        kind = (SOURCE, SADDLE, SINK)[cp.index]
        points.append(SingularPoint(cp.position, cp.hessian,
                                    tuple(complex(x) for x in cp.eigenvalues), kind, cp.index, cp.chart))
    if any(p.kind == SADDLE for p in points):
        raise NotImplementedError("separatrices crossing sphere-model charts are not traced")
    return _points_graph(points, [])


def ms_graph_isomorphic(g1: MorseSmaleGraph, g2: MorseSmaleGraph, max_nodes: int = 16) -> bool:
    """Backtracking search for a label- and edge-preserving node bijection.

    Non-isomorphic graphs certify inequivalent fields; isomorphic graphs are
    only evidence of equivalence.
    """
    if len(g1.nodes) > max_nodes or len(g2.nodes) > max_nodes:
        raise TooLarge(f"graphs with more than {max_nodes} nodes are not compared")
    if len(g1.nodes) != len(g2.nodes) or len(g1.edges) != len(g2.edges):
        return False
    lab1 = {i: (k, idx) for i, k, idx in g1.nodes}
    lab2 = {i: (k, idx) for i, k, idx in g2.nodes}
    if Counter(lab1.values()) != Counter(lab2.values()):
        return False
    e1 = Counter((s, t, r) for s, t, r, _ in g1.edges)
    e2 = Counter((s, t, r) for s, t, r, _ in g2.edges)
    order = sorted(lab1, key=lambda i: -sum(c for (s, t, _), c in e1.items() if i in (s, t)))
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def consistent(a):
        for b in mapping:
            for x, y in ((a, b), (b, a)):
                for r in ("stable", "unstable"):
                    if e1.get((x, y, r), 0) != e2.get((mapping[x], mapping[y], r), 0):
                        return False
        return True

    def search(k):
        if k == len(order):
            return True
        a = order[k]
        for b in lab2:
            if b in used or lab2[b] != lab1[a]:
                continue
            mapping[a] = b
            used.add(b)
            if consistent(a) and search(k + 1):
                return True
            del mapping[a]
            used.discard(b)
        return False

    return search(0)


def dump_trajectories(seps_or_trajs, directory) -> list[Path]:
    """Write each trajectory as ``t,u,v`` CSV; returns the paths written."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = []
    for k, item in enumerate(seps_or_trajs):
        if isinstance(item, Separatrix):
            name = f"saddle{item.saddle}_{item.role}{item.slot}.csv"
            traj = item.trajectory
        else:
            name, traj = f"trajectory{k}.csv", item
        path = d / name
        traj.to_csv(path)
        paths.append(path)
    return paths


__all__ = [
    "FlowOptions", "SingularPoint", "Trajectory", "Separatrix", "MSVerdict", "MorseSmaleGraph",
    "gradient_field", "find_singular_points", "integrate_trajectory", "integrate_batch",
    "separatrices", "morse_smale_check", "ms_graph", "ms_graph_isomorphic", "dump_trajectories",
    "classify_jacobian",
]
