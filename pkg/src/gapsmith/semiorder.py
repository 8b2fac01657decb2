"""Finite semiorders: axioms, trace, Scott-Suppes values under threshold 1.

Representations are synthesized by difference constraints solved with
Bellman-Ford over exact rationals: x < y forces u(y) - u(x) >= 1 + slack,
incomparability forces |u(y) - u(x)| <= 1, and the trace order is imposed so
the output is trace-monotone (equal values inside each trace class).
"""

from __future__ import annotations

import itertools
import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .rationals import format_rational, parse_rational

Matrix = tuple[tuple[bool, ...], ...]


class NotAsymmetric(ValueError):
    def __init__(self, i: int, j: int):
        self.pair = (i, j)
        super().__init__(f"relation not asymmetric/irreflexive at ({i}, {j})")


class NotASemiorder(ValueError):
    """Relation violates one of the two semiorder axioms."""


class SynthesisFailed(RuntimeError):
    """Difference-constraint solving exhausted the slack schedule."""


class TooLarge(ValueError):
    """Exhaustive enumeration requested beyond the configured bound."""


def _as_matrix(strict) -> Matrix:
    return tuple(tuple(bool(v) for v in row) for row in strict)


@dataclass(frozen=True)
class Semiorder:
    n: int
    strict: Matrix

    def __post_init__(self) -> None:
        if len(self.strict) != self.n or any(len(r) != self.n for r in self.strict):
            raise ValueError("relation matrix has the wrong shape")
        for i in range(self.n):
            if self.strict[i][i]:
                raise NotAsymmetric(i, i)
            for j in range(i + 1, self.n):
                if self.strict[i][j] and self.strict[j][i]:
                    raise NotAsymmetric(i, j)

    def prec(self, x: int, y: int) -> bool:
        return self.strict[x][y]

    def to_json_dict(self) -> dict:
        return {"n": self.n, "strict": [list(row) for row in self.strict]}


def semiorder(n: int, pairs: Iterable[tuple[int, int]]) -> Semiorder:
    m = [[False] * n for _ in range(n)]
    for x, y in pairs:
        m[x][y] = True
    return Semiorder(n, _as_matrix(m))


def from_json_dict(obj: dict) -> Semiorder:
    return Semiorder(int(obj["n"]), _as_matrix(obj["strict"]))


@dataclass(frozen=True)
class TraceOrder:
    weak: Matrix  # weak[x][y] iff x is trace-below-or-equivalent to y

    def le(self, x: int, y: int) -> bool:
        return self.weak[x][y]

    def equiv(self, x: int, y: int) -> bool:
        return self.weak[x][y] and self.weak[y][x]


@dataclass(frozen=True)
class SSRep:
    """Utility values under the fixed threshold 1."""

    values: tuple[Fraction, ...]

    def to_json_dict(self) -> dict:
        return {"values": [format_rational(v) for v in self.values]}


def ssrep_from_json_dict(obj: dict) -> SSRep:
    return SSRep(tuple(parse_rational(v) for v in obj["values"]))


# -- verdicts ------------------------------------------------------------------


@dataclass(frozen=True)
class Valid:
    kind: str = "valid"


@dataclass(frozen=True)
class Violates1:
    x: int
    y: int
    z: int
    t: int
    kind: str = "violates1"


@dataclass(frozen=True)
class Violates2:
    x: int
    y: int
    z: int
    w: int
    kind: str = "violates2"


Verdict = Union[Valid, Violates1, Violates2]


def check_axioms(strict) -> Verdict:
    """Semiorder axioms on an asymmetric irreflexive matrix, with witnesses."""
    m = _as_matrix(strict)
    n = len(m)
    for i in range(n):
        if m[i][i]:
            raise NotAsymmetric(i, i)
        for j in range(n):
            if i != j and m[i][j] and m[j][i]:
                raise NotAsymmetric(i, j)
    rng = range(n)
    for x, y, z, t in itertools.product(rng, repeat=4):
        if m[x][y] and m[z][t] and not m[x][t] and not m[z][y]:
            return Violates1(x, y, z, t)
    for x, y, z in itertools.product(rng, repeat=3):
        if m[x][y] and m[y][z]:
            for w in rng:
                if not m[x][w] and not m[w][z]:
                    return Violates2(x, y, z, w)
    return Valid()


def _require_semiorder(r: Semiorder) -> None:
    verdict = check_axioms(r.strict)
    if not isinstance(verdict, Valid):
        raise NotASemiorder(f"axiom violation: {verdict}")


def trace(r: Semiorder) -> TraceOrder:
    """x lies trace-below y iff every z below x is below y and every z above y is above x."""
    n = r.n
    weak = [
        [
            all(
                (not r.strict[z][x] or r.strict[z][y])
                and (not r.strict[y][z] or r.strict[x][z])
                for z in range(n)
            )
            for y in range(n)
        ]
        for x in range(n)
    ]
    return TraceOrder(_as_matrix(weak))


def check_ss(r: Semiorder, u: SSRep) -> tuple[bool, Optional[tuple[int, int]]]:
    """x < y  <=>  u(x)+1 < u(y), over all ordered pairs; witness on failure."""
    if len(u.values) != r.n:
        raise ValueError("value count does not match the ground set")
    for x in range(r.n):
        for y in range(r.n):
            if x == y:
                continue
            if r.strict[x][y] != (u.values[x] + 1 < u.values[y]):
                return False, (x, y)
    return True, None


def synthesize_ss(r: Semiorder) -> SSRep:
    """Trace-monotone rational representation via shortest-path feasibility."""
    _require_semiorder(r)
    n = r.n
    if n == 1:
        return SSRep((Fraction(0),))
    tr = trace(r)
    slack = Fraction(1, 2 * n)
    floor = Fraction(1, 2 * n * math.factorial(n))
    while slack >= floor:
        edges: list[tuple[int, int, Fraction]] = []
        for x in range(n):
            for y in range(n):
                if x == y:
                    continue
                if r.strict[x][y]:
                    edges.append((y, x, -(1 + slack)))  # u_x <= u_y - 1 - slack
                else:
                    edges.append((x, y, Fraction(1)))  # u_y <= u_x + 1
                if tr.weak[x][y]:
                    edges.append((y, x, Fraction(0)))  # u_x <= u_y
        dist = [Fraction(0)] * n
        feasible = True
        for round_ in range(n):
            changed = False
            for a, b, wgt in edges:
                if dist[a] + wgt < dist[b]:
                    dist[b] = dist[a] + wgt
                    changed = True
            if not changed:
                break
        else:
            for a, b, wgt in edges:
                if dist[a] + wgt < dist[b]:
                    feasible = False
                    break
        if feasible:
            low = min(dist)
            rep = SSRep(tuple(v - low for v in dist))
            ok, witness = check_ss(r, rep)
            assert ok, f"solver produced an invalid representation: {witness}"
            return rep
        slack /= 2
    raise SynthesisFailed("slack schedule exhausted on a valid semiorder")


# -- irreducible decomposition and gluing --------------------------------------


def irreducible_blocks(r: Semiorder) -> list[list[int]]:
    """Element blocks of the finest cut decomposition, in order.

    A cut can never split a trace class, so scanning the prefixes of a trace
    linear extension finds every cut.
    """
    tr = trace(r)
    order = sorted(
        range(r.n), key=lambda x: (sum(1 for y in range(r.n) if tr.weak[y][x]), x)
    )
    blocks: list[list[int]] = []
    start = 0
    for cut in range(1, r.n):
        head = order[start:cut]
        tail = order[cut:]
        if all(r.strict[a][b] for a in head for b in tail):
            blocks.append(sorted(head))
            start = cut
    blocks.append(sorted(order[start:]))
    return blocks


def _induced(r: Semiorder, elements: Sequence[int]) -> Semiorder:
    return Semiorder(
        len(elements),
        _as_matrix(
            [[r.strict[a][b] for b in elements] for a in elements]
        ),
    )


def irreducible_components(r: Semiorder) -> list[Semiorder]:
    """Sub-semiorders whose cut concatenation reconstructs the relation."""
    _require_semiorder(r)
    return [_induced(r, block) for block in irreducible_blocks(r)]


def concat_semiorders(parts: Sequence[Semiorder]) -> Semiorder:
    """Disjoint union with every earlier-part element below every later one."""
    n = sum(p.n for p in parts)
    m = [[False] * n for _ in range(n)]
    offset = 0
    offsets = []
    for p in parts:
        offsets.append(offset)
        for a in range(p.n):
            for b in range(p.n):
                m[offset + a][offset + b] = p.strict[a][b]
        offset += p.n
    for i, p in enumerate(parts):
        for j in range(i + 1, len(parts)):
            for a in range(p.n):
                for b in range(parts[j].n):
                    m[offsets[i] + a][offsets[j] + b] = True
    return Semiorder(n, _as_matrix(m))


def glue(parts: Sequence[tuple[Semiorder, SSRep]]) -> SSRep:
    """Left-fold of the two-block gluing: later values shift by sup-inf+2."""
    if not parts:
        raise ValueError("nothing to glue")
    values = list(parts[0][1].values)
    for _, rep in parts[1:]:
        shift = max(values) - min(rep.values) + 2
        values.extend(v + shift for v in rep.values)
    return SSRep(tuple(values))


# -- exhaustive enumeration -----------------------------------------------------


def _max_n() -> int:
    return int(os.environ.get("GAPSMITH_MAX_N", "6"))


def _batched_axiom_filter(n: int, codes: np.ndarray, pair_index) -> np.ndarray:
    """Boolean mask of semiorders among pairwise-state codes (0 none, 1 i<j, 2 j>i)."""
    k = codes.shape[0]
    rel = np.zeros((k, n, n), dtype=bool)
    for p, (i, j) in enumerate(pair_index):
        rel[:, i, j] = codes[:, p] == 1
        rel[:, j, i] = codes[:, p] == 2
    r8 = rel.astype(np.uint8)
    not8 = (~rel).astype(np.uint8)
    a = (np.transpose(r8, (0, 2, 1)) @ not8) > 0
    fail1 = (a & np.transpose(a, (0, 2, 1))).any(axis=(1, 2))
    rr = (r8 @ r8) > 0
    nn = (not8 @ not8) > 0
    fail2 = (rr & nn).any(axis=(1, 2))
    return ~(fail1 | fail2)


def canonical_form(r: Semiorder, order: str = "min") -> bytes:
    """Isomorphism-invariant key: extremal matrix bits over all relabelings."""
    pick = min if order == "min" else max
    best = None
    for perm in itertools.permutations(range(r.n)):
        bits = bytes(
            r.strict[perm[i]][perm[j]] for i in range(r.n) for j in range(r.n)
        )
        best = bits if best is None else pick(best, bits)
    return best


def enumerate_semiorders(
    n: int, up_to_iso: bool = False, canon_order: str = "min"
) -> tuple[int, list[Semiorder]]:
    """All semiorders on n labeled points, optionally deduplicated by shape."""
    if n > _max_n():
        raise TooLarge(f"n={n} above the enumeration cap {_max_n()}")
    if n < 1:
        raise ValueError("n must be positive")
    pair_index = list(itertools.combinations(range(n), 2))
    total = 3 ** len(pair_index)
    out: list[Semiorder] = []
    seen: set[bytes] = set()
    chunk = 65536
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        codes = np.zeros((stop - start, len(pair_index)), dtype=np.int8)
        vals = np.arange(start, stop, dtype=np.int64)
        for p in range(len(pair_index)):
            codes[:, p] = vals % 3
            vals //= 3
        mask = (
            _batched_axiom_filter(n, codes, pair_index)
            if pair_index
            else np.ones(1, dtype=bool)
        )
        for row in codes[mask]:
            m = [[False] * n for _ in range(n)]
            for p, (i, j) in enumerate(pair_index):
                if row[p] == 1:
                    m[i][j] = True
                elif row[p] == 2:
                    m[j][i] = True
            cand = Semiorder(n, _as_matrix(m))
            if up_to_iso:
                key = canonical_form(cand, canon_order)
                if key in seen:
                    continue
                seen.add(key)
            out.append(cand)
    return len(out), out


def dumps(r: Semiorder) -> str:
    return json.dumps(r.to_json_dict())
