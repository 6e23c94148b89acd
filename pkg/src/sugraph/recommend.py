"""Co-dependency ranking, top-k lists and cross-repository accuracy."""

from __future__ import annotations

import json
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from .errors import AnchorNotInProfile, EmptyProfile, InputSyntax
from .metrics import project_cooccurrence
from .universe import ProjectView


@dataclass(frozen=True)
class SystemProfile:
    system: str
    libraries: frozenset[str]

    def __init__(self, system: str, libraries: Iterable[str]):
        object.__setattr__(self, "system", system)
        object.__setattr__(self, "libraries", frozenset(libraries))


@dataclass(frozen=True)
class RankedList:
    anchor: str
    entries: tuple[tuple[str, int], ...]
    k: int

    @property
    def candidates(self) -> tuple[str, ...]:
        return tuple(c for c, _ in self.entries)


@dataclass(frozen=True)
class AccuracyResult:
    system: str
    libraries: int
    hits: int
    accuracy: float


@dataclass(frozen=True)
class CrossRepoReport:
    results: tuple[AccuracyResult, ...]
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float


def codependency_rank(pv: ProjectView, anchor: str, k: int = 10) -> RankedList:
    """Top-``k`` projects by pair popularity with ``anchor``.

    Ties are broken by project id so the list is deterministic; it never
    grows past ``k`` even when the k-th score is shared.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    scores = project_cooccurrence(pv, anchor)
    ranked = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    return RankedList(anchor, tuple(ranked[:k]), k)


def sys_match(ranked: RankedList, profile: SystemProfile) -> int:
    if ranked.anchor not in profile.libraries:
        raise AnchorNotInProfile(f"{ranked.anchor!r} is not a library of {profile.system!r}")
    others = profile.libraries - {ranked.anchor}
    return int(any(c in others for c in ranked.candidates))


def _hits(pv: ProjectView, profile: SystemProfile, k: int) -> int:
    if not profile.libraries:
        raise EmptyProfile(f"system {profile.system!r} lists no libraries")
    # libraries unknown to the reference universe count as misses
    return sum(sys_match(codependency_rank(pv, lib, k), profile) for lib in profile.libraries if lib in pv)


def accuracy(pv: ProjectView, profile: SystemProfile, k: int = 10) -> float:
    """Percentage of the profile's libraries whose top-k list hits another one."""
    return _hits(pv, profile, k) / len(profile.libraries) * 100


def cross_repo_report(pv: ProjectView, profiles: Iterable[SystemProfile], k: int = 10) -> CrossRepoReport:
    results = []
    for profile in profiles:
        hits = _hits(pv, profile, k)
        n = len(profile.libraries)
        results.append(AccuracyResult(profile.system, n, hits, hits / n * 100))
    if results:
        # numpy's default "linear" method matches R's type-7 quantiles
        q = np.percentile([r.accuracy for r in results], [0, 25, 50, 75, 100])
        stats = [float(v) for v in q]
    else:
        stats = [float("nan")] * 5
    return CrossRepoReport(tuple(results), *stats)


def parse_profiles(lines: Iterable[str]) -> list[SystemProfile]:
    """Read ``{"system": id, "libraries": [...]}`` JSON lines."""
    profiles = []
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            obj = json.loads(line)
            system, libs = obj["system"], obj["libraries"]
        except (ValueError, KeyError, TypeError) as exc:
            raise InputSyntax(f"line {lineno}: bad system profile ({exc})") from None
        if not isinstance(system, str) or not isinstance(libs, list) or not all(isinstance(x, str) for x in libs):
            raise InputSyntax(f"line {lineno}: system must be a string and libraries a list of strings")
        profiles.append(SystemProfile(system, libs))
    return profiles
