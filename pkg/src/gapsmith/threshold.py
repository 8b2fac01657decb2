"""Gap removal that preserves the unit threshold: x+1 < y  <=>  g(x)+1 < g(y).

A single bad gap [r, w) of length d < 1 is fused by a map assembled from
four affine families on the unit grid anchored at w:

* expansion pieces of slope 1/(1-d) that stretch each translate of the
  material slice onto its full unit cell while the structural chain holds
  (``Lambda1``), or between squeeze windows beyond it (``Lambda2``);
* flat pieces over the verified-empty gap translates (``Lambda3``);
* squeeze pieces over each terminal window, shrinking d + gamma_l + gamma_r
  of room into the (gamma_l+gamma_r)-sized image slot the expansions leave
  (``ContractionC``; split at a window singleton into C1/C2 with the
  singleton's image dictated by the unit-shift identity).

Beyond the terminal depth the whole map repeats with period one, so the
threshold relation is preserved against arbitrary deep structure.  The two
certificates are hard postconditions: a failure aborts the operation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import plmap
from . import pointset as ps
from . import structure as st
from .pointset import EmptySet, Gap, GapKind, NotBad, PointSet, UnitPartition
from .structure import ChainInfo, GapContext, GapTooLong


class StructureViolated(RuntimeError):
    """Structural preconditions fail; no threshold-preserving map is built."""

    def __init__(self, failure, note: str = ""):
        self.failure = failure
        self.note = note
        super().__init__(f"{note or 'structure check failed'}: {failure}")


class CertificateFailed(RuntimeError):
    """A hard postcondition certificate failed; carries the witness pair."""

    def __init__(self, kind: str, witness):
        self.kind = kind
        self.witness = witness
        super().__init__(f"{kind} certificate failed at {witness}")


@dataclass(frozen=True)
class ThresholdPlan:
    gap: Gap
    orientation: str  # "closed_open" | "open_closed"
    m: Optional[int]  # left-chain terminal depth (None: chain left the span)
    m_prime: Optional[int]  # right-chain terminal depth
    gammas: tuple[tuple[str, int, Fraction, Fraction], ...]
    pieces: tuple[plmap.AffinePiece, ...]
    structure: tuple[GapContext, GapContext]
    notes: tuple[str, ...]


@dataclass(frozen=True)
class ThresholdStep:
    index: int
    cell: int
    gap_original: Gap
    gap_current: Gap
    plan: ThresholdPlan
    map: plmap.PLMap
    sup_norm: Fraction


@dataclass(frozen=True)
class ScheduleTrace:
    interval_order: tuple[int, ...]
    per_interval_deltas: tuple[tuple[Fraction, ...], ...]
    eps0: Optional[Fraction]
    eps1: Optional[Fraction]
    sup_norm_ledger: tuple[Fraction, ...]
    steps: tuple[ThresholdStep, ...]
    partition: Optional[UnitPartition]
    notes: tuple[str, ...]


def _azone_value(t: Fraction, r: Fraction, w: Fraction, expand: Fraction) -> Fraction:
    """Value of the ambient expansion/flat family at t, ignoring squeeze windows."""
    if t >= w:
        n = math.ceil(t - w)
        if n == 0:
            return w
        base = w + n - 1
        if t <= r + n:
            return base + expand * (t - base)
        return Fraction(w + n)
    n = math.ceil(w - t) - 1
    base = w - 1 - n
    if t <= r - n:
        return base + expand * (t - base)
    return Fraction(w - n)


def _co_pieces(
    frame: PointSet, r: Fraction, w: Fraction, left: ChainInfo, right: ChainInfo
) -> tuple[tuple[plmap.AffinePiece, ...], tuple[str, ...]]:
    delta = w - r
    expand = 1 / (1 - delta)
    a_lo, b_hi = frame.inf, frame.sup
    trim = (1 - delta) / 2
    notes: list[str] = []
    pieces: list[plmap.AffinePiece] = []

    def az(t: Fraction) -> Fraction:
        return _azone_value(t, r, w, expand)

    def add(lo, hi, v_lo, v_hi, tag) -> None:
        if lo == hi:
            return
        lo2, hi2 = max(lo, a_lo), min(hi, b_hi)
        if lo2 >= hi2:
            return
        slope = (v_hi - v_lo) / (hi - lo)
        pieces.append(plmap.AffinePiece(lo2, hi2, slope, v_lo - slope * lo, tag=tag))

    m_left = left.m if left.terminal == "b" else None
    m_right = right.m if right.terminal == "b" else None
    if m_left is not None:
        gl_l, gr_l = min(left.gamma_l, trim), min(left.gamma_r, trim)
    if m_right is not None:
        gl_r, gr_r = min(right.gamma_l, trim), min(right.gamma_r, trim)
        notes.append(
            "right-side expansion strips anchored one unit up from the printed "
            "domains so that the pieces tile"
        )

    # Left expansion zone, including the base cell whose flat is the gap itself.
    n = 0
    while True:
        cell_bot = w - 1 - n
        stretch_lo = cell_bot
        if m_left is not None and n == m_left - 1:
            stretch_lo = w - m_left + gr_l
        add(stretch_lo, r - n, az(stretch_lo), w - n, "Lambda1")
        add(r - n, w - n, Fraction(w - n), Fraction(w - n), "Lambda3")
        n += 1
        if m_left is not None:
            if n == m_left:
                break
        elif cell_bot <= a_lo:
            break

    if m_left is not None:
        w_lo, w_hi = r - m_left - gl_l, w - m_left + gr_l
        img_lo, img_hi = w - m_left - gl_l * expand, w - m_left + gr_l * expand
        window: list[tuple] = []
        if left.singleton is None:
            window.append((w_lo, w_hi, img_lo, img_hi, "ContractionC"))
        else:
            s = left.singleton
            fs = az(s + 1) - 1
            if s > w_lo:
                window.append((w_lo, s, img_lo, fs, "ContractionC1"))
            if s < w_hi:
                window.append((s, w_hi, fs, img_hi, "ContractionC2"))
        for seg in window:
            add(*seg)
        period_top = r - m_left + 1 - gl_l
        period = window + [(w_hi, period_top, az(w_hi), az(period_top), "Lambda2")]
        j = 1
        while period_top - j > a_lo:
            for (u, v, vu, vv, tag) in period:
                add(u - j, v - j, vu - j, vv - j, tag)
            j += 1

    # Right expansion zone.
    if m_right is not None or b_hi > w:
        n = 1
        while True:
            cell_bot = w + n - 1
            if m_right is None and cell_bot >= b_hi:
                break
            if m_right is not None and n == m_right:
                add(cell_bot, r + n - gl_r, az(cell_bot), az(r + n - gl_r), "Lambda1")
                break
            add(cell_bot, r + n, az(cell_bot), Fraction(w + n), "Lambda1")
            add(r + n, w + n, Fraction(w + n), Fraction(w + n), "Lambda3")
            n += 1

    if m_right is not None:
        w_lo, w_hi = r + m_right - gl_r, w + m_right + gr_r
        img_lo, img_hi = w + m_right - gl_r * expand, w + m_right + gr_r * expand
        window = []
        if right.singleton is None:
            window.append((w_lo, w_hi, img_lo, img_hi, "ContractionC"))
        else:
            s = right.singleton
            fs = az(s - 1) + 1
            if s > w_lo:
                window.append((w_lo, s, img_lo, fs, "ContractionC1"))
            if s < w_hi:
                window.append((s, w_hi, fs, img_hi, "ContractionC2"))
        for seg in window:
            add(*seg)
        period_bot = w + m_right - 1 + gr_r
        period = [(period_bot, w_lo, az(period_bot), img_lo, "Lambda2")] + window
        j = 1
        while period_bot + j < b_hi:
            for (u, v, vu, vv, tag) in period:
                add(u + j, v + j, vu + j, vv + j, tag)
            j += 1

    pieces.sort(key=lambda p: (p.lo, p.hi))
    notes.extend(left.notes)
    notes.extend(right.notes)
    return tuple(pieces), tuple(dict.fromkeys(notes))


def _reflect_pieces(
    pieces: tuple[plmap.AffinePiece, ...]
) -> tuple[plmap.AffinePiece, ...]:
    out = [
        plmap.AffinePiece(-p.hi, -p.lo, p.slope, -p.intercept, tag=p.tag)
        for p in pieces
    ]
    return tuple(sorted(out, key=lambda p: (p.lo, p.hi)))


def plan_gap(
    s: PointSet, g: Gap, ctx: tuple[GapContext, GapContext]
) -> ThresholdPlan:
    """Piece tiling that fuses ``g`` while preserving the unit threshold."""
    ctx_right, ctx_left = ctx
    for c in ctx:
        if c.failure is not None:
            raise StructureViolated(c.failure)
    frame, r, w, co_right, co_left = st.co_frame_chains(s, g)
    pieces, notes = _co_pieces(frame, r, w, co_left, co_right)
    if g.kind == GapKind.OPEN_CLOSED:
        pieces = _reflect_pieces(pieces)
        notes = notes + ("open-closed gap handled by the mirrored construction",)
        orientation = "open_closed"
    else:
        orientation = "closed_open"
    gammas = tuple(
        (c.direction, step.n, step.gamma_l, step.gamma_r)
        for c in (ctx_right, ctx_left)
        for step in c.steps
    )
    return ThresholdPlan(
        gap=g,
        orientation=orientation,
        m=ctx_left.m,
        m_prime=ctx_right.m,
        gammas=gammas,
        pieces=pieces,
        structure=(ctx_right, ctx_left),
        notes=notes,
    )


def apply_plan(s: PointSet, plan: ThresholdPlan) -> tuple[plmap.PLMap, PointSet]:
    """Apply the plan; both certificates are hard postconditions."""
    fmap = plmap.PLMap(plan.pieces, s)
    img = plmap.image(fmap, s)
    ok, witness = plmap.is_strictly_increasing_on(fmap, s)
    if not ok:
        raise CertificateFailed("strict_increase", witness)
    ok, witness = plmap.threshold_equiv(fmap, s)
    if not ok:
        raise CertificateFailed("threshold_equivalence", witness)
    if fmap.apply(plan.gap.lo) != fmap.apply(plan.gap.hi):
        raise CertificateFailed("gap_not_closed", (plan.gap.lo, plan.gap.hi))
    return fmap, img


def sup_norm(fmap: plmap.PLMap, s: PointSet) -> Fraction:
    """Exact sup of |f(t) - t| over the certificate sample of ``s``."""
    pts = plmap.certificate_points(fmap, s)
    return max(abs(fmap.apply(t) - t) for t in pts)


def _closed_end(g: Gap) -> Fraction:
    return g.hi if g.kind == GapKind.CLOSED_OPEN else g.lo


def _cell_of(part: UnitPartition, g: Gap) -> int:
    x = _closed_end(g) - part.anchor
    if g.kind == GapKind.CLOSED_OPEN:
        return math.ceil(x) + 1
    return math.floor(x) + 2


@dataclass
class _Schedule:
    partition: UnitPartition
    cell_order: list[int]
    cell_gaps: dict[int, list[Gap]]
    cell_deltas: dict[int, list[Fraction]]
    notes: list[str]


def _schedule(s: PointSet) -> _Schedule:
    bads = ps.bad_gaps_biggest_first(s)
    anchor = _closed_end(bads[0])
    part = ps.unit_partition(s, anchor)
    cell_gaps: dict[int, list[Gap]] = {}
    for g in bads:
        cell_gaps.setdefault(_cell_of(part, g), []).append(g)
    notes: list[str] = []
    cell_deltas: dict[int, list[Fraction]] = {}
    for k, lo, hi in part.intervals:
        parts: list[Fraction] = []
        for g in bads:
            overlap = min(g.hi, hi) - max(g.lo, lo)
            if overlap > 0:
                parts.append(overlap)
                if overlap < g.length:
                    notes.append(
                        "straddling gap ledgered as two consecutive bad gaps "
                        f"at the grid point inside [{g.lo}, {g.hi}]"
                    )
        if parts:
            cell_deltas[k] = sorted(parts, reverse=True)
    order = sorted(
        cell_gaps, key=lambda k: (-max(g.length for g in cell_gaps[k]), k)
    )
    return _Schedule(part, order, cell_gaps, cell_deltas, list(dict.fromkeys(notes)))


def _remove_original_gap(s, gmap, current, g0):
    """One threshold step for the original gap ``g0``; None if already fused."""
    lo, hi = gmap.apply(g0.lo), gmap.apply(g0.hi)
    if lo == hi:
        return None
    cur_gap = Gap(lo, hi, g0.kind)
    assert cur_gap in ps.gaps(current), "tracked gap drifted from the image set"
    ctx = st.analyze_gap(current, cur_gap)
    for c in ctx:
        if c.failure is not None:
            raise StructureViolated(
                c.failure, note="structure broke mid-pipeline; surfacing as a finding"
            )
    plan = plan_gap(current, cur_gap, ctx)
    fmap, nxt = apply_plan(current, plan)
    return cur_gap, plan, fmap, nxt


def _identity_trace(s: PointSet, eps0=None, eps1=None) -> tuple:
    return plmap.identity(s), s, ScheduleTrace((), (), eps0, eps1, (), (), None, ())


def remove_strong(s: PointSet) -> tuple[plmap.PLMap, PointSet, ScheduleTrace]:
    """Remove every bad gap while preserving the unit threshold exactly."""
    if not s:
        raise EmptySet("nothing to remove from the empty set")
    report = st.check_all(s)
    if not report.passed:
        raise StructureViolated(report.failure)
    if not ps.bad_gaps(s):
        return _identity_trace(s)
    sched = _schedule(s)
    gmap = plmap.identity(s)
    current = s
    steps: list[ThresholdStep] = []
    ledger: list[Fraction] = []
    notes = list(sched.notes)
    visited: list[int] = []
    for k in sched.cell_order:
        visited.append(k)
        for g0 in sorted(sched.cell_gaps[k], key=lambda g: (-g.length, g.lo)):
            result = _remove_original_gap(s, gmap, current, g0)
            if result is None:
                notes.append(f"gap at [{g0.lo}, {g0.hi}] already fused; skipped")
                continue
            cur_gap, plan, fmap, nxt = result
            norm = sup_norm(fmap, current)
            current = nxt
            gmap = plmap.compose(fmap, gmap)
            ledger.append(norm)
            steps.append(
                ThresholdStep(len(steps) + 1, k, g0, cur_gap, plan, fmap, norm)
            )
    assert not ps.bad_gaps(current), "strong removal left a bad gap"
    ok, witness = plmap.is_strictly_increasing_on(gmap, s)
    if not ok:
        raise CertificateFailed("strict_increase", witness)
    ok, witness = plmap.threshold_equiv(gmap, s)
    if not ok:
        raise CertificateFailed("threshold_equivalence", witness)
    ledger.append(Fraction(0))
    trace = ScheduleTrace(
        interval_order=tuple(visited),
        per_interval_deltas=tuple(
            tuple(sched.cell_deltas.get(k, ())) for k in visited
        ),
        eps0=None,
        eps1=None,
        sup_norm_ledger=tuple(ledger),
        steps=tuple(steps),
        partition=sched.partition,
        notes=tuple(dict.fromkeys(notes)),
    )
    return gmap, current, trace


def remove_epsilon(
    s: PointSet, eps0: Fraction
) -> tuple[plmap.PLMap, PointSet, ScheduleTrace]:
    """Shrink every bad gap below ``eps0`` while preserving the unit threshold."""
    if eps0 <= 0:
        raise ValueError("eps0 must be positive")
    if not s:
        raise EmptySet("nothing to remove from the empty set")
    report = st.check_all(s)
    if not report.passed:
        raise StructureViolated(report.failure)
    bads = ps.bad_gaps_biggest_first(s)
    if not bads:
        return _identity_trace(s, eps0=eps0, eps1=eps0 / 2)
    sched = _schedule(s)
    budget = Fraction(1)
    for deltas in sched.cell_deltas.values():
        factor = 1 - sum(deltas, Fraction(0))
        if factor <= 0:
            raise StructureViolated(None, note="a unit cell is entirely bad gaps")
        budget *= factor
    eps1 = eps0 * budget / 2
    if bads[0].length < eps0:
        return _identity_trace(s, eps0=eps0, eps1=eps1)
    gmap = plmap.identity(s)
    current = s
    steps: list[ThresholdStep] = []
    ledger: list[Fraction] = []
    notes = list(sched.notes)
    visited: list[int] = []

    def step_on(g0: Gap, cell: int) -> bool:
        nonlocal gmap, current
        result = _remove_original_gap(s, gmap, current, g0)
        if result is None:
            return False
        cur_gap, plan, fmap, nxt = result
        norm = sup_norm(fmap, current)
        current = nxt
        gmap = plmap.compose(fmap, gmap)
        ledger.append(norm)
        steps.append(ThresholdStep(len(steps) + 1, cell, g0, cur_gap, plan, fmap, norm))
        return True

    def current_length(g0: Gap) -> Fraction:
        return gmap.apply(g0.hi) - gmap.apply(g0.lo)

    for k in sched.cell_order:
        visited.append(k)
        while True:
            live = [g for g in sched.cell_gaps[k] if current_length(g) >= eps1]
            if not live:
                break
            target = max(live, key=lambda g: (current_length(g), -g.lo))
            step_on(target, k)
    # Budget safety: the per-cell stop bound uses the original masses, so a
    # heavily re-stretched residue could in principle still reach eps0.
    while True:
        live = [g for g in ps.bad_gaps_biggest_first(s) if current_length(g) >= eps0]
        if not live:
            break
        target = max(live, key=lambda g: (current_length(g), -g.lo))
        cell = _cell_of(sched.partition, target)
        visited.append(cell)
        notes.append("budget safety pass revisited a cell")
        step_on(target, cell)
    assert all(g.length < eps0 for g in ps.bad_gaps(current))
    ok, witness = plmap.is_strictly_increasing_on(gmap, s)
    if not ok:
        raise CertificateFailed("strict_increase", witness)
    ok, witness = plmap.threshold_equiv(gmap, s)
    if not ok:
        raise CertificateFailed("threshold_equivalence", witness)
    ledger.append(Fraction(0))
    trace = ScheduleTrace(
        interval_order=tuple(visited),
        per_interval_deltas=tuple(
            tuple(sched.cell_deltas.get(k, ())) for k in visited
        ),
        eps0=eps0,
        eps1=eps1,
        sup_norm_ledger=tuple(ledger),
        steps=tuple(steps),
        partition=sched.partition,
        notes=tuple(dict.fromkeys(notes)),
    )
    return gmap, current, trace
