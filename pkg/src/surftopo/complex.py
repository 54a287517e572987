"""Finite 2-dimensional cell complexes and the complex of a polygon gluing."""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from scipy.cluster.hierarchy import DisjointSet

from .errors import ComplexFormatError, WordSyntaxError
from .words import EdgeLetter, GluingWord, format_word, parse_word


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str


@dataclass(frozen=True)
class Face:
    id: str
    boundary: tuple[EdgeLetter, ...]


@dataclass(frozen=True)
class CellComplex:
    """0-, 1- and 2-cells with attaching data given combinatorially.

    Each edge is oriented from ``tail`` to ``head``; each face is attached
    along a closed edge path.  Construction does not validate; see
    :func:`validate_complex`.
    """

    vertices: tuple[str, ...] = ()
    edges: tuple[Edge, ...] = ()
    faces: tuple[Face, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "faces", tuple(self.faces))

    @property
    def counts(self) -> tuple[int, int, int]:
        return len(self.vertices), len(self.edges), len(self.faces)

    def edge(self, edge_id: str) -> Edge:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise KeyError(edge_id)

    def is_connected(self) -> bool:
        return len(_components(self)) <= 1

    def to_text(self) -> str:
        lines = [f"vertex {v}" for v in self.vertices]
        lines += [f"edge {e.id} {e.tail} {e.head}" for e in self.edges]
        lines += [f"face {f.id} {format_word(f.boundary)}".rstrip() for f in self.faces]
        return "\n".join(lines) + "\n"


def _components(c: CellComplex) -> list[set[str]]:
    adj: dict[str, set[str]] = {v: set() for v in c.vertices}
    for e in c.edges:
        if e.tail in adj and e.head in adj:
            adj[e.tail].add(e.head)
            adj[e.head].add(e.tail)
    seen: set[str] = set()
    comps = []
    for v in c.vertices:
        if v in seen:
            continue
        comp = {v}
        queue = deque([v])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in comp:
                    comp.add(y)
                    queue.append(y)
        seen |= comp
        comps.append(comp)
    return comps


_ID = re.compile(r"^[A-Za-z0-9_]+$")


def parse_complex(text: str) -> CellComplex:
    """Read the line-oriented complex format.

    ::

        # torus
        vertex v0
        edge a v0 v0
        edge b v0 v0
        face f0 a b a^-1 b^-1
    """
    vertices, edges, faces = [], [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kind, _, rest = line.partition(" ")
        parts = rest.split()
        if kind == "vertex" and len(parts) == 1:
            vertices.append(_check_id(parts[0], lineno))
        elif kind == "edge" and len(parts) == 3:
            edges.append(Edge(*(_check_id(p, lineno) for p in parts)))
        elif kind == "face" and len(parts) >= 1:
            fid = _check_id(parts[0], lineno)
            body = rest.strip()[len(parts[0]):]
            try:
                boundary = parse_word(body)
            except WordSyntaxError as exc:
                raise ComplexFormatError(f"line {lineno}: {exc}") from exc
            faces.append(Face(fid, boundary))
        else:
            raise ComplexFormatError(f"line {lineno}: cannot parse {raw!r}")
    return CellComplex(tuple(vertices), tuple(edges), tuple(faces))


def _check_id(token: str, lineno: int) -> str:
    if not _ID.match(token):
        raise ComplexFormatError(f"line {lineno}: bad identifier {token!r}")
    return token


def _corner_orbits(w: GluingWord) -> tuple[DisjointSet, list[int], list[int]]:
    """Identify polygon corners under the side gluings.

    Side ``i`` runs from corner ``i`` to corner ``i+1``.  Returns the
    disjoint set of corners together with the tail and head corner of each
    side, read in the direction of the edge it carries.
    """
    n = len(w.letters)
    ds = DisjointSet(range(n))
    tails, heads = [], []
    for i, x in enumerate(w.letters):
        a, b = i, (i + 1) % n
        if x.exponent < 0:
            a, b = b, a
        tails.append(a)
        heads.append(b)
    first: dict[str, int] = {}
    for i, x in enumerate(w.letters):
        j = first.setdefault(x.label, i)
        if j != i:
            ds.merge(tails[i], tails[j])
            ds.merge(heads[i], heads[j])
    return ds, tails, heads


def word_to_complex(w: GluingWord) -> CellComplex:
    """One face, one edge per label, vertices = classes of glued corners."""
    ds, tails, heads = _corner_orbits(w)
    n = len(w.letters)
    names: dict[int, str] = {}
    for corner in range(n):
        root = ds[corner]
        if root not in names:
            names[root] = f"v{len(names)}"
    edges = []
    seen = set()
    for i, x in enumerate(w.letters):
        if x.label in seen:
            continue
        seen.add(x.label)
        edges.append(Edge(x.label, names[ds[tails[i]]], names[ds[heads[i]]]))
    return CellComplex(tuple(names.values()), tuple(edges), (Face("f0", w.letters),))


def euler_characteristic(c: CellComplex) -> int:
    v, e, f = c.counts
    return v - e + f


def orientability(w: GluingWord) -> bool:
    """True iff every label is glued with reversed orientation (``x ... x^-1``)."""
    signs: dict[str, int] = {}
    for x in w.letters:
        signs[x.label] = signs.get(x.label, 0) + x.exponent
    return all(s == 0 for s in signs.values())


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_complex(c: CellComplex) -> ValidationReport:
    """Check closure-finiteness combinatorially.

    Violations: duplicate ids, edge endpoints that are not vertices, face
    letters over unknown edges, face boundaries that are not closed paths.
    A disconnected 1-skeleton is only a warning.
    """
    report = ValidationReport()
    for kind, ids in (("vertex", c.vertices), ("edge", [e.id for e in c.edges]),
                      ("face", [f.id for f in c.faces])):
        ids = list(ids)
        for d in sorted({x for x in ids if ids.count(x) > 1}):
            report.violations.append(f"duplicate {kind} id {d}")
    verts = set(c.vertices)
    edges = {}
    for e in c.edges:
        edges[e.id] = e
        for end in (e.tail, e.head):
            if end not in verts:
                report.violations.append(f"edge {e.id} references missing vertex {end}")
    for f in c.faces:
        missing = [x.label for x in f.boundary if x.label not in edges]
        for m in dict.fromkeys(missing):
            report.violations.append(f"face {f.id} references missing edge {m}")
        if missing or not f.boundary:
            continue
        if not _is_closed_path(f.boundary, edges):
            report.violations.append(f"face {f.id} boundary is not a closed edge path")
    if not c.is_connected():
        report.warnings.append("1-skeleton is not connected")
    return report


def _is_closed_path(letters: Iterable[EdgeLetter], edges: dict[str, Edge]) -> bool:
    ends = []
    for x in letters:
        e = edges[x.label]
        ends.append((e.tail, e.head) if x.exponent > 0 else (e.head, e.tail))
    return all(ends[i][1] == ends[(i + 1) % len(ends)][0] for i in range(len(ends)))
