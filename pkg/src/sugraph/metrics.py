"""Popularity, adoption-diffusion and co-dependency metrics."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from datetime import datetime
from enum import Enum

import numpy as np

from . import kernels
from .errors import (
    NotPredecessor,
    NotSameProject,
    PairNotInSet,
    SamePairMember,
    UnknownProject,
)
from .timeutil import from_millis, to_millis
from .universe import NodeKey, ProjectView, Universe, _as_key


class Kind(str, Enum):
    POPULARITY = "popularity"
    VARIETY = "variety"


@dataclass(frozen=True)
class TimeSeries:
    """Step function sampled where its value changes.

    The value between samples is that of the latest sample at or before the
    query time, and 0 before the first sample.
    """

    subject: NodeKey
    kind: Kind
    samples: tuple[tuple[datetime, int], ...]

    def value_at(self, t: datetime) -> int:
        value = 0
        for when, v in self.samples:
            if when > t:
                break
            value = v
        return value

    @property
    def final(self) -> int:
        return self.samples[-1][1] if self.samples else 0


@dataclass(frozen=True)
class SupersedingPoint:
    predecessor: NodeKey
    successor: NodeKey
    kind: Kind
    time: datetime


@dataclass(frozen=True)
class PairMatrix:
    """Co-dependency counts between two ordered axes.

    ``outside_x``/``outside_y`` are only filled for release-level matrices.
    """

    axis_x: tuple
    axis_y: tuple
    counts: np.ndarray
    intensity: np.ndarray
    outside_x: tuple[int, ...] | None = None
    outside_y: tuple[int, ...] | None = None


def popularity(u: Universe, key) -> int:
    return len(u._in[u._idx(key)])


def variety(u: Universe, key) -> int:
    labels = u._labels()
    return len({int(labels[d]) for d in u._in[u._idx(key)]})


def _dependents_at(u: Universe, key, t: datetime | None) -> list[int]:
    i = u._idx(key)
    if t is None:
        return list(u._in[i])
    times = u._times()
    cutoff = to_millis(t)
    if times[i] > cutoff:
        return []
    return [d for d in u._in[i] if times[d] <= cutoff]


def popularity_at(u: Universe, key, t: datetime | None) -> int:
    """Popularity of ``key`` in the timed subgraph at ``t`` (0 before its release)."""
    return len(_dependents_at(u, key, t))


def variety_at(u: Universe, key, t: datetime | None) -> int:
    # chains are time ordered, so surviving members of a project stay connected
    labels = u._labels()
    return len({int(labels[d]) for d in _dependents_at(u, key, t)})


def _events(u: Universe, key) -> list[tuple[int, int]]:
    """(effective time in ms, dependent index) sorted by time."""
    i = u._idx(key)
    times = u._times()
    own = int(times[i])
    return sorted((max(int(times[d]), own), d) for d in u._in[i])


def diffusion_series(u: Universe, key, kind: Kind | str = Kind.POPULARITY) -> TimeSeries:
    kind = Kind(kind)
    key = _as_key(key)
    labels = u._labels()
    samples: list[tuple[int, int]] = []
    seen: set[int] = set()
    count = 0
    for ms, d in _events(u, key):
        if kind is Kind.POPULARITY:
            count += 1
        else:
            seen.add(int(labels[d]))
            count = len(seen)
        if samples and samples[-1][0] == ms:
            samples[-1] = (ms, count)
        elif not samples or samples[-1][1] != count:
            samples.append((ms, count))
    return TimeSeries(key, kind, tuple((from_millis(ms), v) for ms, v in samples))


def superseding_points(u: Universe, a, b, kind: Kind | str = Kind.POPULARITY, *, all_crossings: bool = False):
    """Earliest time the later release ``b`` strictly overtakes ``a``.

    Returns ``None`` when it never does. With ``all_crossings`` a list of
    every time ``b`` moves from not-ahead to strictly ahead is returned.
    """
    kind = Kind(kind)
    a, b = _as_key(a), _as_key(b)
    if u.project_of(a) != u.project_of(b):
        raise NotSameProject(f"{a} and {b} belong to different projects")
    if not u.precedes(a, b):
        raise NotPredecessor(f"{a} does not precede {b} on its update chain")
    sa = diffusion_series(u, a, kind)
    sb = diffusion_series(u, b, kind)
    times = sorted({t for t, _ in sa.samples} | {t for t, _ in sb.samples})
    points = []
    ahead = False
    va = vb = 0
    ia = ib = 0
    for t in times:
        while ia < len(sa.samples) and sa.samples[ia][0] <= t:
            va = sa.samples[ia][1]
            ia += 1
        while ib < len(sb.samples) and sb.samples[ib][0] <= t:
            vb = sb.samples[ib][1]
            ib += 1
        now = vb > va
        if now and not ahead:
            point = SupersedingPoint(a, b, kind, t)
            if not all_crossings:
                return point
            points.append(point)
        ahead = now
    return points if all_crossings else None


def _node_cooccurrence(u: Universe, key) -> np.ndarray:
    c = u._csr()
    return kernels.cooccurrence(c.fwd_indptr, c.fwd_indices, c.rev_indptr, c.rev_indices, u._idx(key))


def pair_popularity(u: Universe, x, y) -> int:
    i, j = u._idx(x), u._idx(y)
    if i == j:
        raise SamePairMember(f"pair needs two distinct nodes, got {_as_key(x)} twice")
    small, large = sorted((u._in[i], u._in[j]), key=len)
    return sum(1 for d in small if d in large)


def outside(u: Universe, x, y) -> int:
    """Co-dependency count of ``x`` with every node outside both projects."""
    i, j = u._idx(x), u._idx(y)
    labels = u._labels()
    if labels[i] == labels[j]:
        raise SamePairMember(f"{_as_key(x)} and {_as_key(y)} share a project")
    counts = _node_cooccurrence(u, x)
    mask = (labels != labels[i]) & (labels != labels[j])
    return int(counts[mask].sum())


def project_pair_popularity(pv: ProjectView, px: str, py: str) -> int:
    p, q = pv._p(px), pv._p(py)
    if p == q:
        raise SamePairMember(f"pair needs two distinct projects, got {px!r} twice")
    c = pv._csr
    rp = set(c.rev_indices[c.rev_indptr[p]:c.rev_indptr[p + 1]].tolist())
    rq = c.rev_indices[c.rev_indptr[q]:c.rev_indptr[q + 1]].tolist()
    return sum(1 for d in rq if d in rp)


def project_cooccurrence(pv: ProjectView, anchor: str) -> dict[str, int]:
    """Pair popularity of ``anchor`` with every project it co-occurs with."""
    c = pv._csr
    counts = kernels.cooccurrence(c.fwd_indptr, c.fwd_indices, c.rev_indptr, c.rev_indices, pv._p(anchor))
    ids = pv.ids
    return {ids[k]: int(counts[k]) for k in np.flatnonzero(counts).tolist()}


def _matrix(fwd_indptr, fwd_indices, rev_indptr, rev_indices, cols: list[int], n: int) -> np.ndarray:
    member_pos = np.full(n, -1, dtype=np.int64)
    member_pos[cols] = np.arange(len(cols), dtype=np.int64)
    if cols:
        rows = np.unique(np.concatenate([rev_indices[rev_indptr[k]:rev_indptr[k + 1]] for k in cols]))
    else:
        rows = np.empty(0, dtype=np.int64)
    return kernels.pair_matrix(fwd_indptr, fwd_indices, rows.astype(np.int64), member_pos, len(cols))


def _normalise(counts: np.ndarray) -> np.ndarray:
    top = counts.max() if counts.size else 0
    if top == 0:
        return np.zeros(counts.shape, dtype=float)
    return counts / top


def project_pair_matrix(pv: ProjectView, projects: Iterable[str]) -> PairMatrix:
    """Pair popularity and intensity over a project set, diagonal zeroed."""
    projects = tuple(dict.fromkeys(projects))
    cols = [pv._p(p) for p in projects]
    c = pv._csr
    counts = _matrix(c.fwd_indptr, c.fwd_indices, c.rev_indptr, c.rev_indices, cols, len(pv))
    return PairMatrix(projects, projects, counts, _normalise(counts))


def intensity(pv: ProjectView, px: str, py: str, projects: Iterable[str]) -> float:
    projects = tuple(dict.fromkeys(projects))
    for p in projects:
        pv._p(p)
    pv._p(px), pv._p(py)
    if px not in projects or py not in projects:
        raise PairNotInSet(f"{px!r} and {py!r} must both be in the project set")
    if len(projects) < 2:
        raise PairNotInSet("the project set needs at least two projects")
    if px == py:
        raise SamePairMember(f"pair needs two distinct projects, got {px!r} twice")
    m = project_pair_matrix(pv, projects)
    return float(m.intensity[projects.index(px), projects.index(py)])


def release_pair_matrix(u: Universe, px: str, py: str) -> PairMatrix:
    """Release-by-release pair popularity of two projects plus outside margins.

    Axes run in update-chain (time) order; intensity is relative to the
    largest cell of the grid.
    """
    pv = u.aggregate()
    if px == py:
        raise SamePairMember(f"pair needs two distinct projects, got {px!r} twice")
    xs, ys = pv.members.get(px), pv.members.get(py)
    if xs is None or ys is None:
        raise UnknownProject(f"unknown project {px if xs is None else py!r}")
    c = u._csr()
    cols = [u._idx(k) for k in xs + ys]
    full = _matrix(c.fwd_indptr, c.fwd_indices, c.rev_indptr, c.rev_indices, cols, len(u))
    counts = np.ascontiguousarray(full[: len(xs), len(xs):])
    return PairMatrix(
        xs,
        ys,
        counts,
        _normalise(counts),
        tuple(outside(u, x, ys[0]) for x in xs),
        tuple(outside(u, y, xs[0]) for y in ys),
    )


def reuse(u: Universe) -> int:
    """Number of distinct projects in the union of all reverse-dependency sets."""
    labels = u._labels()
    return len({int(labels[i]) for i, out in enumerate(u._out) if out})


def project_popularities(pv: ProjectView) -> dict[str, int]:
    return {pid: pv.popularity(pid) for pid in pv.ids}
