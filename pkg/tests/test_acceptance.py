"""The ten acceptance criteria, one test each.

Every criterion records a PASS/FAIL line; the lines are printed in the
pytest terminal summary, or directly when this file is run as a script.
"""
from __future__ import annotations

import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from oracles import flood_fill_level_curves, word_euler  # noqa: E402
from surftopo import (AbelianInvariants, FlowOptions, ScalarField, SolverOptions,  # noqa: E402
                      SurfaceChart, SurfaceType, abelianization, canonical_word, central_hessian,
                      classify_surface, euler_characteristic, euler_from_indices,
                      field_from_expression, gradient_field, integrate_batch,
                      integrate_trajectory, is_morse, level_component_count, morse_smale_check,
                      ms_graph, ms_graph_isomorphic, parse_complex, parse_gluing_word,
                      pi1_from_complex, reeb_sphere_check, sphere_height_model,
                      vector_field_from_expressions, word_to_complex)
from surftopo.flow import SADDLE, SINK, SOURCE  # noqa: E402
from surftopo.morse import sample_grid  # noqa: E402

PI = math.pi
TORUS_H = "(cos(u)+2)*cos(v)"
# perturbation verified to make the torus gradient Morse-Smale
PERTURBED_H = "(cos(u)+2)*cos(v)+0.3*sin(u)*sin(v)"
DATA = Path(__file__).resolve().parents[1] / "data"

RESULTS: dict[int, tuple[str, str, str]] = {}

TITLES = {
    1: "torus Morse example",
    2: "Morse-Smale counterexample",
    3: "classification table",
    4: "fundamental-group facts",
    5: "Reeb criterion",
    6: "level-set constancy",
    7: "gradient monotonicity",
    8: "numerical order checks",
    9: "Euler-characteristic consistency",
    10: "MS-graph equivalence",
}


def torus_chart() -> SurfaceChart:
    return SurfaceChart.square(0.0, 2 * PI, periodic=True)


def _torus_class(position) -> tuple[int, int]:
    """Which of (0,0), (0,pi), (pi,0), (pi,pi) a point sits at, mod 2 pi."""
    return tuple(int(round(x / PI)) % 2 for x in position)


def _mod_2pi_error(position, exact) -> float:
    d = np.asarray(position) - np.asarray(exact)
    d = d - 2 * PI * np.round(d / (2 * PI))
    return float(np.abs(d).max())


# ------------------------------------------------------------------ criteria

def criterion_1():
    start = time.perf_counter()
    f = field_from_expression(TORUS_H, torus_chart())
    report = is_morse(f)
    elapsed = time.perf_counter() - start
    exact = {(0, 0): ((0.0, 0.0), [[-1, 0], [0, -3]], 2),
             (0, 1): ((0.0, PI), [[1, 0], [0, 3]], 0),
             (1, 0): ((PI, 0.0), [[1, 0], [0, -1]], 1),
             (1, 1): ((PI, PI), [[-1, 0], [0, 1]], 1)}
    assert len(report.critical_points) == 4, report.critical_points
    found = {_torus_class(p.position): p for p in report.critical_points}
    assert set(found) == set(exact)
    indices = []
    for key in [(0, 0), (0, 1), (1, 0), (1, 1)]:
        pos, H, _ = exact[key]
        p = found[key]
        assert _mod_2pi_error(p.position, pos) <= 1e-6, (key, p.position)
        assert np.abs(np.array(p.hessian) - H).max() <= 1e-4, (key, p.hessian)
        indices.append(p.index)
    assert tuple(indices) == (2, 0, 1, 1)
    assert report.is_morse
    assert elapsed < 5.0, f"took {elapsed:.2f} s"
    return f"4 points, indices {tuple(indices)}, {elapsed:.2f} s"


def criterion_2():
    start = time.perf_counter()
    X = gradient_field(field_from_expression(TORUS_H, torus_chart()))
    opts = FlowOptions(tol_capture=1e-3)
    assert opts.tol_capture * X.chart.span == pytest.approx(1e-3 * 2 * PI)
    verdict = morse_smale_check(X, opts)
    elapsed = time.perf_counter() - start
    assert not verdict.is_morse_smale
    pairs = {frozenset((_torus_class(verdict.singular_points[a].position),
                        _torus_class(verdict.singular_points[b].position)))
             for a, b, _, _ in verdict.saddle_connections}
    assert frozenset({(1, 0), (1, 1)}) in pairs, pairs
    assert elapsed < 30.0, f"took {elapsed:.2f} s"
    return f"{len(verdict.saddle_connections)} saddle-saddle separatrices, {elapsed:.2f} s"


def criterion_3():
    table = [
        ("a b a^-1 b^-1", SurfaceType.orientable(1), 0),
        ("a a", SurfaceType.non_orientable(1), 1),
        ("a b a b^-1", SurfaceType.non_orientable(2), 0),
        ("a a b b", SurfaceType.non_orientable(2), 0),
        ("a a^-1", SurfaceType.orientable(0), 2),
        (str(canonical_word(SurfaceType.orientable(2))), SurfaceType.orientable(2), -2),
    ]
    for text, kind, chi in table:
        w = parse_gluing_word(text)
        assert classify_surface(w) == kind, text
        assert euler_characteristic(word_to_complex(w)) == chi, text
        assert word_euler([(x.label, x.exponent) for x in w]) == chi, text
    return "6 words classified, chi confirmed by corner-orbit oracle"


def criterion_4():
    torus = pi1_from_complex(parse_complex((DATA / "torus.cx").read_text()))
    rp2 = pi1_from_complex(parse_complex((DATA / "rp2.cx").read_text()))
    assert abelianization(torus) == AbelianInvariants(2, ())
    assert abelianization(rp2) == AbelianInvariants(0, (2,))
    for n in range(1, 7):
        p = pi1_from_complex(word_to_complex(canonical_word(SurfaceType.non_orientable(n))))
        relator = " ".join(f"c{i} c{i}" for i in range(1, n + 1))
        assert [" ".join(str(x) for x in r) for r in p.relators] == [relator]
        assert abelianization(p) == AbelianInvariants(n - 1, (2,)), n
    return "torus Z^2, RP2 Z/2, N_n = Z^(n-1) + Z/2 for n = 1..6"


def criterion_5():
    sphere = is_morse(sphere_height_model())
    assert len(sphere.critical_points) == 2 and sphere.is_morse
    assert reeb_sphere_check(sphere) is True
    torus = is_morse(field_from_expression(TORUS_H, torus_chart()))
    assert reeb_sphere_check(torus) is False
    return "sphere true, torus false"


def criterion_6():
    f = field_from_expression(TORUS_H, torus_chart())
    crit = sorted(round(p.value, 6) for p in is_morse(f).critical_points)
    assert crit == [-3.0, -1.0, 1.0, 3.0], crit
    fine = sample_grid(f, 1024)
    counts = []
    for lo, hi in zip(crit, crit[1:]):
        levels = [lo + (hi - lo) * k / 6 for k in range(1, 6)]
        got = [level_component_count(f, y, resolution=256) for y in levels]
        oracle = [flood_fill_level_curves(fine, y, True, True) for y in levels]
        assert got == oracle, (lo, hi, got, oracle)
        assert len(set(got)) == 1, (lo, hi, got)
        counts.append(got[0])
    assert counts == [1, 2, 1]
    return f"components per interval {counts}"


def criterion_7():
    f = field_from_expression(TORUS_H, torus_chart())
    X = gradient_field(f)
    rng = np.random.default_rng(20240607)
    seeds = rng.uniform(0.0, 2 * PI, (100, 2))
    trajs = integrate_batch(X, seeds, np.ones(100))
    worst = 0.0
    for t in trajs:
        values = f(t.samples[:, 1:])
        worst = min(worst, float(np.diff(values).min()) if len(values) > 1 else 0.0)
    assert worst >= -1e-9 * f.scale, worst
    return f"largest decrease {abs(worst):.2e} over 100 trajectories"


def criterion_8():
    chart = SurfaceChart.square(-2.0, 2.0)
    X = vector_field_from_expressions("-v", "u", chart)
    errs = []
    for frac in (0.0125, 0.00625):
        steps = round(1.0 / (frac * chart.span))
        t = integrate_trajectory(X, (1.0, 0.0), opts=FlowOptions(dt=frac), singular_points=[],
                                 max_steps=steps)
        T = t.samples[-1, 0]
        errs.append(float(np.linalg.norm(t.end - [math.cos(T), math.sin(T)])))
    rk_ratio = errs[0] / errs[1]
    assert 8 <= rk_ratio <= 32, rk_ratio

    f = field_from_expression(TORUS_H, torus_chart())
    u, v = 0.7, 1.3
    exact = np.array([[-math.cos(u) * math.cos(v), math.sin(u) * math.sin(v)],
                      [math.sin(u) * math.sin(v), -(math.cos(u) + 2) * math.cos(v)]])
    steps = [1e-2, 5e-3, 2.5e-3]
    herr = [np.abs(central_hessian(f, np.array([u, v]), h) - exact).max() for h in steps]
    h_ratios = [a / b for a, b in zip(herr, herr[1:])]
    assert all(3.5 <= r <= 4.5 for r in h_ratios), h_ratios
    assert np.abs(central_hessian(f, np.array([u, v])) - exact).max() < 1e-6
    return f"RK4 ratio {rk_ratio:.1f}, Hessian ratios {', '.join(f'{r:.2f}' for r in h_ratios)}"


def _reparam_check(rng, h_report_index):
    theta1, theta2 = rng.uniform(0, 2 * PI, 2)
    s = rng.uniform(0.6, 1.6, 2)
    rot = lambda a: np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])
    A = rot(theta1) @ np.diag(s) @ rot(theta2)
    c = np.array([PI / 2, PI / 2]) + rng.uniform(-0.3, 0.3, 2)

    def g(x, y):
        uu = c[0] + A[0, 0] * x + A[0, 1] * y
        vv = c[1] + A[1, 0] * x + A[1, 1] * y
        return (np.cos(uu) + 2) * np.cos(vv)

    chart = SurfaceChart.square(-2.0, 2.0)
    report = is_morse(ScalarField(g, chart, "h o A"), SolverOptions(grid=40))
    assert report.is_morse
    seen = set()
    for cp in report.critical_points:
        p = c + A @ np.array(cp.position)
        lattice = np.round(p / PI)
        assert np.abs(p - lattice * PI).max() < 1e-6, p
        key = tuple(int(k) for k in lattice)
        assert cp.index == h_report_index(key), (key, cp.index)
        seen.add(key)
    # every lattice point whose preimage is comfortably inside the chart is found
    Ainv = np.linalg.inv(A)
    for k in range(-3, 6):
        for m in range(-3, 6):
            x = Ainv @ (np.array([k * PI, m * PI]) - c)
            if np.all(np.abs(x) < 1.95):
                assert (k, m) in seen, (k, m)
    return len(report.critical_points)


def criterion_9():
    torus = is_morse(field_from_expression(TORUS_H, torus_chart()))
    assert euler_from_indices(torus) == 0 == euler_characteristic(word_to_complex(parse_gluing_word("a b a^-1 b^-1")))
    sphere = is_morse(sphere_height_model())
    assert euler_from_indices(sphere) == 2 == euler_characteristic(word_to_complex(parse_gluing_word("a a^-1")))
    # the torus indices found on the periodic chart, indexed by the lattice class mod 2
    by_class = {_torus_class(p.position): p.index for p in torus.critical_points}
    rng = np.random.default_rng(99)
    total = sum(_reparam_check(rng, lambda key: by_class[(key[0] % 2, key[1] % 2)]) for _ in range(20))
    return f"chi 0 and 2 match; indices invariant over 20 reparametrizations ({total} points)"


def criterion_10():
    f = field_from_expression(PERTURBED_H, torus_chart())
    X = gradient_field(f)
    g64 = ms_graph(X, FlowOptions(solver=SolverOptions(grid=64)))
    g128 = ms_graph(X, FlowOptions(solver=SolverOptions(grid=128)))
    kinds = g64.kind_counts()
    assert kinds == {SOURCE: 1, SINK: 1, SADDLE: 2}, kinds
    assert len(g64.edges) == 8
    assert ms_graph_isomorphic(g64, g128)
    assert not ms_graph_isomorphic(g64, ms_graph(sphere_height_model()))
    return "1 source, 1 sink, 2 saddles, 8 edges; grids 64 and 128 isomorphic; differs from sphere"


CRITERIA = {n: globals()[f"criterion_{n}"] for n in TITLES}


def _run(n: int) -> None:
    try:
        detail = CRITERIA[n]()
    except Exception as exc:
        RESULTS[n] = ("FAIL", TITLES[n], f"{type(exc).__name__}: {exc}")
        raise
    RESULTS[n] = ("PASS", TITLES[n], detail)


@pytest.mark.parametrize("n", sorted(TITLES))
def test_criterion(n):
    _run(n)


def result_line(n: int) -> str:
    status, title, detail = RESULTS[n]
    return f"criterion {n:2d} {status}: {title} ({detail})"


if __name__ == "__main__":
    failed = 0
    for n in sorted(TITLES):
        try:
            _run(n)
        except Exception:
            failed += 1
        print(result_line(n), flush=True)
    sys.exit(1 if failed else 0)
