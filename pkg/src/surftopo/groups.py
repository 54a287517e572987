"""Finite group presentations: pi_1 of 2-complexes, amalgamation, abelianization."""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from numbers import Integral
from typing import Iterable, Sequence

from .complex import CellComplex
from .errors import (ArithmeticOverflow, HasFaces, MissingBasepoint, NotConnected,
                     UnknownGenerator)
from .words import EdgeLetter, format_word, free_reduce, invert_word, parse_word


def _as_word(w) -> tuple[EdgeLetter, ...]:
    if isinstance(w, str):
        return parse_word(w)
    return tuple(w)


@dataclass(frozen=True)
class GroupPresentation:
    generators: tuple[str, ...]
    relators: tuple[tuple[EdgeLetter, ...], ...] = ()

    def __post_init__(self):
        gens = tuple(self.generators)
        rels = tuple(_as_word(r) for r in self.relators)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relators", rels)
        if len(set(gens)) != len(gens):
            raise ValueError(f"duplicate generators in {gens}")
        known = set(gens)
        for r in rels:
            for x in r:
                if x.label not in known:
                    raise UnknownGenerator(f"relator {format_word(r)} uses undeclared {x.label}")

    def __str__(self):
        rels = ", ".join(format_word(r) for r in self.relators)
        body = f"{', '.join(self.generators)} | {rels}".strip()
        return f"< {body} >"

    @classmethod
    def parse(cls, text: str) -> "GroupPresentation":
        m = re.fullmatch(r"\s*<(.*)\|(.*)>\s*", text)
        if not m:
            raise ValueError(f"cannot parse presentation {text!r}")
        gens = [g.strip() for g in m.group(1).split(",") if g.strip()]
        rels = [parse_word(r) for r in m.group(2).split(",") if r.strip()]
        return cls(tuple(gens), tuple(rels))

    def relation_matrix(self) -> list[list[int]]:
        """Exponent sums: one row per relator, one column per generator."""
        col = {g: j for j, g in enumerate(self.generators)}
        rows = []
        for r in self.relators:
            row = [0] * len(self.generators)
            for x in r:
                row[col[x.label]] += x.exponent
            rows.append(row)
        return rows


@dataclass(frozen=True)
class AbelianInvariants:
    """Z^free_rank + Z/d1 + Z/d2 + ... with d1 | d2 | ..."""

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        if any(d < 2 for d in self.torsion):
            raise ValueError(f"torsion coefficients must be >= 2: {self.torsion}")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"torsion {self.torsion} is not a divisibility chain")

    def __str__(self):
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) or "0"


def smith_normal_form(matrix: Sequence[Sequence[int]]):
    """Smith normal form over the integers with exact (Python int) arithmetic.

    Returns ``(D, U, V)`` with ``U @ A @ V == D``, ``U`` and ``V`` unimodular
    and ``D`` diagonal with non-negative entries ``d1 | d2 | ...``.
    """
    A = [[_exact_int(x) for x in row] for row in matrix]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (A, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(src, dst, k):  # row dst += k * row src
        for M in (A, U):
            M[dst] = [a + k * b for a, b in zip(M[dst], M[src])]

    def add_col(src, dst, k):
        for M in (A, V):
            for row in M:
                row[dst] += k * row[src]

    for t in range(min(m, n)):
        while True:
            nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
            if not nz:
                break
            _, i, j = min(nz)
            swap_rows(t, i)
            swap_cols(t, j)
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                q = A[i][t] // p
                if q:
                    add_row(t, i, -q)
                dirty |= A[i][t] != 0
            for j in range(t + 1, n):
                q = A[t][j] // p
                if q:
                    add_col(t, j, -q)
                dirty |= A[t][j] != 0
            if dirty:
                continue
            # pivot must divide the rest of the block
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % p), None)
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if t < m and t < n and A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return A, U, V


def _exact_int(x) -> int:
    if isinstance(x, Integral):
        return int(x)
    if float(x).is_integer():
        return int(x)
    raise ArithmeticOverflow(f"matrix entry {x!r} is not an exact integer")


def abelianization(p: GroupPresentation) -> AbelianInvariants:
    ngen = len(p.generators)
    rows = p.relation_matrix()
    if not rows or not ngen:
        return AbelianInvariants(ngen, ())
    D, _, _ = smith_normal_form(rows)
    diag = [D[i][i] for i in range(min(len(D), ngen))]
    rank = sum(1 for d in diag if d)
    return AbelianInvariants(ngen - rank, tuple(d for d in diag if d > 1))


def _natural_key(s: str):
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", s)]


def spanning_tree(c: CellComplex, basepoint: str | None = None,
                  edge_order: Iterable[str] | None = None) -> set[str]:
    """Edge ids of a BFS spanning tree of the 1-skeleton.

    Edges are tried in natural id order unless ``edge_order`` gives a priority.
    """
    if not c.vertices:
        raise NotConnected("complex has no vertices")
    if basepoint is None:
        basepoint = c.vertices[0]
    if basepoint not in c.vertices:
        raise MissingBasepoint(f"no vertex {basepoint!r}")
    if edge_order is None:
        ordered = sorted(c.edges, key=lambda e: _natural_key(e.id))
    else:
        rank = {eid: k for k, eid in enumerate(edge_order)}
        ordered = sorted(c.edges, key=lambda e: rank[e.id])
    incident: dict[str, list] = {v: [] for v in c.vertices}
    for e in ordered:
        if e.tail != e.head:
            incident[e.tail].append((e.id, e.head))
            incident[e.head].append((e.id, e.tail))
    tree = set()
    seen = {basepoint}
    queue = deque([basepoint])
    while queue:
        x = queue.popleft()
        for eid, y in incident[x]:
            if y not in seen:
                seen.add(y)
                tree.add(eid)
                queue.append(y)
    if len(seen) != len(c.vertices):
        raise NotConnected(f"{len(c.vertices) - len(seen)} vertices unreachable from {basepoint}")
    return tree


def pi1_from_complex(c: CellComplex, basepoint: str | None = None,
                     edge_order: Iterable[str] | None = None) -> GroupPresentation:
    """Presentation of pi_1: non-tree edges generate, face boundaries relate.

    Contracting a spanning tree leaves a bouquet of circles, one per
    remaining edge; each face contributes its boundary with tree edges
    deleted.
    """
    tree = spanning_tree(c, basepoint, edge_order)
    gens = tuple(e.id for e in c.edges if e.id not in tree)
    relators = []
    for f in c.faces:
        r = free_reduce(x for x in f.boundary if x.label not in tree)
        if r:
            relators.append(r)
    return GroupPresentation(gens, tuple(relators))


def amalgamated_product(pU: GroupPresentation, pV: GroupPresentation,
                        w_generators: Sequence[str], i_images, j_images) -> GroupPresentation:
    """Presentation of pi_1(U) *_{pi_1(W)} pi_1(V).

    ``i_images[k]`` / ``j_images[k]`` are the images of ``w_generators[k]``
    as words (or word strings) over the generators of ``pU`` / ``pV``.
    Clashing generator names of ``pV`` are renamed with a numeric suffix.
    """
    if not (len(w_generators) == len(i_images) == len(j_images)):
        raise ValueError("one image word per W-generator is required on each side")
    used = set(pU.generators)
    rename = {}
    for g in pV.generators:
        new, k = g, 2
        while new in used:
            new, k = f"{g}{k}", k + 1
        rename[g] = new
        used.add(new)

    def over_v(word):
        return tuple(EdgeLetter(rename[x.label], x.exponent) for x in word)

    relators = list(pU.relators) + [over_v(r) for r in pV.relators]
    for a, wi, wj in zip(w_generators, i_images, j_images):
        wi, wj = _as_word(wi), _as_word(wj)
        for word, gens, side in ((wi, pU.generators, "U"), (wj, pV.generators, "V")):
            unknown = [x.label for x in word if x.label not in gens]
            if unknown:
                raise UnknownGenerator(f"image of {a} in {side} uses unknown generator {unknown[0]}")
        r = free_reduce(wi + invert_word(over_v(wj)))
        if r:
            relators.append(r)
    gens = tuple(pU.generators) + tuple(rename[g] for g in pV.generators)
    return GroupPresentation(gens, tuple(relators))


def graph_free_rank(c: CellComplex) -> int:
    """Rank of the free group pi_1 of a connected graph: E - V + 1."""
    if c.faces:
        raise HasFaces(f"{len(c.faces)} faces present; expected a 1-complex")
    if not c.vertices or not c.is_connected():
        raise NotConnected("graph is not connected")
    return len(c.edges) - len(c.vertices) + 1
