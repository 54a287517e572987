"""Command-line front end: ``surftopo {classify,pi1,morse,flow}``.

Exit codes: 0 success, 2 parse error, 3 invalid surface word, 4 topology
precondition, 5 numeric failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import errors
from .classify import canonical_word, classify_surface
from .complex import (euler_characteristic, orientability, parse_complex, validate_complex,
                      word_to_complex)
from .expr import evaluate_constant
from .fields import SurfaceChart, field_from_expression, vector_field_from_expressions
from .flow import (FlowOptions, dump_trajectories, find_singular_points, gradient_field,
                   morse_smale_check, _points_graph)
from .groups import abelianization, pi1_from_complex
from .morse import SolverOptions, euler_from_indices, is_morse, reeb_sphere_check
from .words import parse_gluing_word

EXIT_OK, EXIT_PARSE, EXIT_WORD, EXIT_TOPOLOGY, EXIT_NUMERIC = 0, 2, 3, 4, 5


@dataclass
class RunReport:
    command: list
    inputs_digest: str
    results: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    exit_code: int = 0
    error: str | None = None

    def to_dict(self) -> dict:
        return {"command": self.command, "inputs_digest": self.inputs_digest,
                "exit_code": self.exit_code, "error": self.error,
                "warnings": self.warnings, "results": self.results}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls(**json.loads(text))

    def to_text(self) -> str:
        """One ``key = <json value>`` line per field; results are flattened
        with dotted keys."""
        lines = []
        for key in ("command", "inputs_digest", "exit_code", "error", "warnings"):
            lines.append(f"{key} = {json.dumps(getattr(self, key))}")
        for key, value in _flatten(self.results, "results"):
            lines.append(f"{key} = {json.dumps(value)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunReport":
        data: dict = {"results": {}}
        for line in text.splitlines():
            if not line.strip():
                continue
            key, _, raw = line.partition(" = ")
            value = json.loads(raw)
            parts = key.split(".")
            target = data
            for p in parts[:-1]:
                target = target.setdefault(p, {})
            target[parts[-1]] = value
        return cls(**data)


def _flatten(d: dict, prefix: str):
    if not d:
        yield prefix, {}
        return
    for k, v in d.items():
        key = f"{prefix}.{k}"
        if isinstance(v, dict) and v:
            yield from _flatten(v, key)
        else:
            yield key, v


def _digest(payload) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


# ----------------------------------------------------------------- commands

def cmd_classify(word_text: str) -> dict:
    w = parse_gluing_word(word_text)
    c = word_to_complex(w)
    t = classify_surface(w)
    v, e, f = c.counts
    return {"word": str(w), "V": v, "E": e, "F": f, "euler_characteristic": euler_characteristic(c),
            "orientable": orientability(w), "surface": str(t), "canonical_word": str(canonical_word(t))}


def cmd_pi1(complex_text: str, abelian: bool = False, basepoint: str | None = None) -> dict:
    c = parse_complex(complex_text)
    report = validate_complex(c)
    if not report.ok:
        raise _InvalidComplex("; ".join(report.violations))
    p = pi1_from_complex(c, basepoint)
    out = {"presentation": str(p), "generators": list(p.generators),
           "relators": [" ".join(str(x) for x in r) for r in p.relators]}
    if abelian:
        ab = abelianization(p)
        out["abelian"] = {"free_rank": ab.free_rank, "torsion": list(ab.torsion), "group": str(ab)}
    return out


class _InvalidComplex(errors.SurftopoError):
    pass


def _chart(args) -> SurfaceChart:
    urange = _parse_range(args.urange or args.range)
    vrange = _parse_range(args.vrange or args.range)
    return SurfaceChart(urange, vrange, args.periodic_u, args.periodic_v)


def _parse_range(text: str) -> tuple[float, float]:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise errors.ExpressionSyntaxError(f"range must look like lo:hi, got {text!r}")
    return evaluate_constant(lo), evaluate_constant(hi)


def cmd_morse(expr: str, chart: SurfaceChart, opts: SolverOptions) -> dict:
    f = field_from_expression(expr, chart)
    report = is_morse(f, opts)
    out = {"chart": chart.describe(), **report.to_dict()}
    if report.is_morse:
        out["euler_from_indices"] = euler_from_indices(report)
        if report.closed_manifold:
            out["reeb_sphere"] = reeb_sphere_check(report)
    else:
        out["degenerate_positions"] = [list(p.position) for p in report.degenerate_points]
    return out


def cmd_flow(exprs, gradient_of, chart, opts: FlowOptions, ms_check=False, graph_path=None,
             dump_dir=None) -> tuple[dict, list]:
    warnings = []
    if gradient_of is not None:
        X = gradient_field(field_from_expression(gradient_of, chart), opts.solver.grad_step)
    else:
        X = vector_field_from_expressions(exprs[0], exprs[1], chart)
    out: dict = {"field": X.name, "chart": chart.describe()}
    if not (ms_check or graph_path or dump_dir):
        pts = find_singular_points(X, opts)
        out["singular_points"] = [p.to_dict() for p in pts]
        return out, warnings
    verdict = morse_smale_check(X, opts)
    out.update(verdict.to_dict())
    if graph_path:
        if verdict.is_morse_smale:
            g = _points_graph(verdict.singular_points, verdict.separatrices)
            path = Path(graph_path)
            path.write_text(g.to_dot() if path.suffix == ".dot" else g.to_text())
            out["graph"] = {"path": str(path), "nodes": len(g.nodes), "edges": len(g.edges),
                            "kinds": dict(sorted(g.kind_counts().items()))}
        else:
            warnings.append("graph not written: field is not Morse-Smale")
    if dump_dir:
        paths = dump_trajectories(verdict.separatrices, dump_dir)
        out["trajectory_files"] = [str(p) for p in paths]
    return out, warnings


# --------------------------------------------------------------------- main

def _add_chart_args(p):
    p.add_argument("--range", default="0:2*pi", help="lo:hi for both axes (expressions allowed)")
    p.add_argument("--urange")
    p.add_argument("--vrange")
    p.add_argument("--periodic-u", action="store_true")
    p.add_argument("--periodic-v", action="store_true")
    p.add_argument("--grid", type=int, default=64, help="Newton seed grid size per axis")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="surftopo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify the closed surface of a gluing word")
    p.add_argument("word")

    p = sub.add_parser("pi1", help="fundamental group presentation of a 2-complex file")
    p.add_argument("complex_file")
    p.add_argument("--abelian", action="store_true")
    p.add_argument("--basepoint")

    p = sub.add_parser("morse", help="critical points and Morse indices of a field")
    p.add_argument("field_expr")
    _add_chart_args(p)

    p = sub.add_parser("flow", help="singular points and Morse-Smale analysis of a vector field")
    p.add_argument("components", nargs="*", metavar="X", help="two component expressions")
    p.add_argument("--gradient-of", metavar="EXPR")
    p.add_argument("--ms-check", action="store_true")
    p.add_argument("--graph", metavar="OUT")
    p.add_argument("--dump-trajectories", metavar="DIR")
    p.add_argument("--dt", type=float, default=1e-3, help="RK4 step as a fraction of the chart span")
    _add_chart_args(p)

    for p in sub.choices.values():
        p.add_argument("--json", action="store_true", help="emit JSON instead of key = value text")
    return parser


_VALUE_FLAGS = ("--range", "--urange", "--vrange", "--grid", "--basepoint", "--gradient-of",
                "--graph", "--dump-trajectories", "--dt")


def _normalize_argv(argv):
    """Separate flags from positionals so expressions such as ``-v`` or
    ranges such as ``-1:1`` are not mistaken for options."""
    flags, positionals, i = [], [], 0
    while i < len(argv):
        a = argv[i]
        if a == "--":
            positionals += argv[i + 1:]
            break
        if a in _VALUE_FLAGS and i + 1 < len(argv):
            flags.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        if a.startswith("--") or a in ("-h",):
            flags.append(a)
        else:
            positionals.append(a)
        i += 1
    if not positionals:
        return flags
    return positionals[:1] + flags + ["--"] + positionals[1:]


def run(argv) -> RunReport:
    argv = list(argv)
    parser = build_parser()
    args = parser.parse_args(_normalize_argv(argv))
    inputs = {k: v for k, v in sorted(vars(args).items()) if k != "json"}
    report = RunReport(command=argv, inputs_digest="")
    try:
        if args.command == "classify":
            report.results = cmd_classify(args.word)
        elif args.command == "pi1":
            text = Path(args.complex_file).read_text()
            inputs["complex_text"] = text
            report.results = cmd_pi1(text, args.abelian, args.basepoint)
        elif args.command == "morse":
            report.results = cmd_morse(args.field_expr, _chart(args), SolverOptions(grid=args.grid))
        elif args.command == "flow":
            wanted = 0 if args.gradient_of is not None else 2
            if len(args.components) != wanted:
                raise errors.ExpressionSyntaxError("give either two component expressions or --gradient-of")
            opts = FlowOptions(dt=args.dt, solver=SolverOptions(grid=args.grid))
            report.results, report.warnings = cmd_flow(
                args.components, args.gradient_of, _chart(args), opts,
                args.ms_check, args.graph, args.dump_trajectories)
    except (errors.WordSyntaxError, errors.ExpressionSyntaxError, errors.ComplexFormatError,
            OSError) as exc:
        report.exit_code, report.error = EXIT_PARSE, str(exc)
    except errors.MalformedSurfaceWord as exc:
        report.exit_code, report.error = EXIT_WORD, str(exc)
    except (errors.NotConnected, errors.MissingBasepoint, errors.HasFaces, _InvalidComplex) as exc:
        report.exit_code, report.error = EXIT_TOPOLOGY, f"{type(exc).__name__}: {exc}"
    except (errors.ChartError, errors.NotMorse, errors.NotMorseSmale, errors.DegeneratePoint,
            FloatingPointError, ArithmeticError) as exc:
        report.exit_code, report.error = EXIT_NUMERIC, f"{type(exc).__name__}: {exc}"
    report.inputs_digest = _digest(inputs)
    return report


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    report = run(argv)
    as_json = "--json" in argv
    sys.stdout.write(report.to_json() if as_json else report.to_text())
    if report.error:
        print(f"error: {report.error}", file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
