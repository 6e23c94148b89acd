"""Building a :class:`Universe` from universe files and Maven POMs.

Universe file format: UTF-8, one JSON object per line::

    {"name":"org.apache:commons-io","release":"2.0","time":"2010-10-27","deps":["junit:junit@4.8.1"]}

Lines starting with ``#`` are comments. Files written by this module start
with a ``# sugraph-universe 1`` header; a header naming any other format
version is rejected.
"""

from __future__ import annotations

import csv
import json
import logging
import os
import re
import xml.etree.ElementTree as ET
from collections.abc import Iterable
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import TextIO

from .errors import FatalSyntax, MalformedXml, MissingCoordinates, ParentMismatch
from .timeutil import format_time, parse_time, to_utc
from .universe import NodeKey, ReleaseNode, Universe

log = logging.getLogger(__name__)

FORMAT_VERSION = "1"
HEADER = f"# sugraph-universe {FORMAT_VERSION}"
_HEADER_RE = re.compile(r"#\s*sugraph-universe\s+(\S+)\s*$")
_FIELDS = {"name", "release", "time", "deps"}


@dataclass(frozen=True)
class ManifestRecord:
    name: str
    release: str
    time: datetime
    deps: tuple[NodeKey, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "time", to_utc(self.time))
        object.__setattr__(self, "deps", tuple(dict.fromkeys(NodeKey(*d) for d in self.deps)))

    @property
    def key(self) -> NodeKey:
        return NodeKey(self.name, self.release)


@dataclass
class IngestReport:
    records_read: int = 0
    nodes_created: int = 0
    dep_edges_created: int = 0
    up_edges_created: int = 0
    skipped_implicit_versions: int = 0
    skipped_unresolvable: int = 0
    times_from_mtime: int = 0
    warnings: list[tuple[str, str]] = field(default_factory=list)

    def warn(self, locator: str, reason: str) -> None:
        log.debug("%s: %s", locator, reason)
        self.warnings.append((locator, reason))

    def as_dict(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if k != "warnings"}
        out["warnings"] = [list(w) for w in self.warnings]
        return out


# universe files


def _record_from_obj(obj) -> ManifestRecord:
    if not isinstance(obj, dict):
        raise ValueError("record must be a JSON object")
    if set(obj) != _FIELDS:
        missing, extra = _FIELDS - set(obj), set(obj) - _FIELDS
        raise ValueError(f"field mismatch (missing {sorted(missing)}, unexpected {sorted(extra)})")
    name, release, time, deps = obj["name"], obj["release"], obj["time"], obj["deps"]
    if not isinstance(name, str) or not name or not isinstance(release, str) or not release:
        raise ValueError("name and release must be non-empty strings")
    if not isinstance(time, str):
        raise ValueError("time must be an ISO-8601 string")
    if not isinstance(deps, list) or not all(isinstance(d, str) for d in deps):
        raise ValueError("deps must be a list of name@release strings")
    return ManifestRecord(name, release, parse_time(time), tuple(NodeKey.parse(d) for d in deps))


def parse_universe_file(
    stream: Iterable[str], *, strict: bool = False, report: IngestReport | None = None, source: str = "<stream>"
) -> list[ManifestRecord]:
    """Parse universe-format lines into records, in file order.

    Malformed lines become report warnings, or raise :class:`FatalSyntax`
    when ``strict``. A header announcing another format version always
    raises.
    """
    report = report if report is not None else IngestReport()
    records = []
    for lineno, raw in enumerate(stream, 1):
        line = raw.strip()
        locator = f"{source}:{lineno}"
        if not line:
            continue
        if line.startswith("#"):
            m = _HEADER_RE.match(line)
            if m and m.group(1) != FORMAT_VERSION:
                raise FatalSyntax(f"{locator}: unsupported universe format version {m.group(1)!r}")
            continue
        try:
            obj = json.loads(line)
            record = _record_from_obj(obj)
        except ValueError as exc:
            if strict:
                raise FatalSyntax(f"{locator}: {exc}") from None
            report.warn(locator, f"malformed record skipped: {exc}")
            continue
        if len(record.deps) != len(obj["deps"]):
            report.warn(locator, "duplicate dependency references collapsed")
        records.append(record)
    return records


def format_record(record: ManifestRecord) -> str:
    obj = {
        "name": record.name,
        "release": record.release,
        "time": format_time(record.time),
        "deps": [str(d) for d in record.deps],
    }
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def write_records(records: Iterable[ManifestRecord], stream: TextIO) -> None:
    stream.write(HEADER + "\n")
    for record in records:
        stream.write(format_record(record) + "\n")


def universe_records(u: Universe) -> list[ManifestRecord]:
    """Canonical record list for ``u``: sorted nodes, sorted dependencies."""
    nodes = sorted(u, key=lambda n: (n.name, n.time, version_sort_key(n.release), n.release))
    return [
        ManifestRecord(n.name, n.release, n.time, tuple(sorted(u.depend(n.key))))
        for n in nodes
    ]


def write_universe(u: Universe, stream: TextIO) -> None:
    write_records(universe_records(u), stream)


def read_universe(path: str | os.PathLike, *, strict: bool = True) -> tuple[Universe, IngestReport]:
    report = IngestReport()
    with open(path, encoding="utf-8") as fh:
        records = parse_universe_file(fh, strict=strict, report=report, source=str(path))
    return build_universe(records, report)


# building


_VERSION_TOKEN = re.compile(r"\d+|\D+")


def version_sort_key(release: str) -> tuple:
    """Numeric-aware ordering key: ``"1.10"`` sorts after ``"1.9"``."""
    return tuple(
        (0, int(tok), "") if tok.isdigit() else (1, 0, tok)
        for tok in _VERSION_TOKEN.findall(release)
    )


def _canonical(record: ManifestRecord) -> tuple:
    return (record.time, tuple(sorted(record.deps)))


def build_universe(
    records: Iterable[ManifestRecord], report: IngestReport | None = None
) -> tuple[Universe, IngestReport]:
    """Fold records into a universe.

    Update edges link consecutive releases of each name ordered by time,
    ties broken by version order. Duplicate keys keep the record with the
    earliest time (then smallest dependency list), so the result does not
    depend on input order. Dependencies on releases that have no record
    are dropped and counted.
    """
    report = report if report is not None else IngestReport()
    records = list(records)
    report.records_read += len(records)

    chosen: dict[NodeKey, ManifestRecord] = {}
    for record in records:
        prev = chosen.get(record.key)
        if prev is None or _canonical(record) < _canonical(prev):
            chosen[record.key] = record
    dup_count = len(records) - len(chosen)
    if dup_count:
        seen: dict[NodeKey, int] = {}
        for record in records:
            seen[record.key] = seen.get(record.key, 0) + 1
        for key in sorted(k for k, c in seen.items() if c > 1):
            report.warn(str(key), f"{seen[key] - 1} duplicate record(s) dropped")

    def order(k: NodeKey):
        return (k.name, chosen[k].time, version_sort_key(k.release), k.release)

    keys = sorted(chosen, key=order)
    u = Universe(ReleaseNode(k.name, k.release, chosen[k].time) for k in keys)
    report.nodes_created += len(keys)

    for prev, nxt in zip(keys, keys[1:]):
        if prev.name == nxt.name:
            u.add_update(prev, nxt, allow_equal_time=True)
            report.up_edges_created += 1

    for k in keys:
        for dep in sorted(chosen[k].deps):
            if dep == k:
                report.warn(str(k), "self dependency ignored")
            elif dep not in chosen:
                report.skipped_unresolvable += 1
                report.warn(str(k), f"unresolvable dependency {dep}")
            else:
                u.add_dependency(k, dep)
                report.dep_edges_created += 1
    return u, report


# POM files


@dataclass(frozen=True)
class PomModel:
    """Raw coordinates and dependencies read from one POM document."""

    group_id: str | None
    artifact_id: str | None
    version: str | None
    parent: tuple[str | None, str | None, str | None] | None = None
    dependencies: tuple[tuple[str | None, str | None, str | None], ...] = ()
    managed: tuple[tuple[tuple[str, str], str], ...] = ()

    @property
    def coordinates(self) -> tuple[str | None, str | None, str | None]:
        """Own coordinates, falling back to the declared parent's."""
        pg, _, pv = self.parent or (None, None, None)
        return (self.group_id or pg, self.artifact_id, self.version or pv)


def _local(tag) -> str:
    return tag.rsplit("}", 1)[-1] if isinstance(tag, str) else ""


def _child(elem, name: str):
    for c in elem:
        if _local(c.tag) == name:
            return c
    return None


def _text(elem, name: str) -> str | None:
    c = _child(elem, name)
    if c is None or c.text is None:
        return None
    return c.text.strip() or None


def _deps(container) -> tuple:
    if container is None:
        return ()
    return tuple(
        (_text(d, "groupId"), _text(d, "artifactId"), _text(d, "version"))
        for d in container
        if _local(d.tag) == "dependency"
    )


def read_pom(xml: str | bytes) -> PomModel:
    try:
        root = ET.fromstring(xml)
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from None
    if _local(root.tag) != "project":
        raise MalformedXml(f"root element is <{_local(root.tag)}>, expected <project>")
    parent_el = _child(root, "parent")
    parent = None
    if parent_el is not None:
        parent = (_text(parent_el, "groupId"), _text(parent_el, "artifactId"), _text(parent_el, "version"))
    dm = _child(root, "dependencyManagement")
    managed = []
    for g, a, v in _deps(_child(dm, "dependencies") if dm is not None else None):
        if g and a and v:
            managed.append(((g, a), v))
    return PomModel(
        _text(root, "groupId"),
        _text(root, "artifactId"),
        _text(root, "version"),
        parent,
        _deps(_child(root, "dependencies")),
        tuple(managed),
    )


def resolve_parent(child: PomModel, parent: PomModel) -> PomModel:
    """Inherit missing coordinates and managed dependency versions from ``parent``."""
    if child.parent is None:
        raise ParentMismatch("child POM declares no parent")
    if tuple(child.parent) != parent.coordinates:
        raise ParentMismatch(f"child declares parent {child.parent}, got {parent.coordinates}")
    pg, _, pv = parent.coordinates
    managed = dict(parent.managed)
    managed.update(dict(child.managed))
    return PomModel(
        child.group_id or pg,
        child.artifact_id,
        child.version or pv,
        child.parent,
        child.dependencies,
        tuple(managed.items()),
    )


def _implicit(value: str) -> bool:
    return "${" in value


def _unusable_version(version: str) -> bool:
    v = version.upper()
    return (
        _implicit(version)
        or "SNAPSHOT" in v
        or v in ("LATEST", "RELEASE")
        or version[:1] in "[("
        or "," in version
    )


def pom_to_record(
    model: PomModel, artifact_time: datetime, *, report: IngestReport | None = None, locator: str = "<pom>"
) -> ManifestRecord:
    report = report if report is not None else IngestReport()
    group, artifact, version = model.coordinates
    if not group or not artifact or not version:
        raise MissingCoordinates(f"{locator}: groupId, artifactId and version are all required")
    if _implicit(group) or _implicit(artifact) or _implicit(version):
        raise MissingCoordinates(f"{locator}: coordinates reference properties ({group}:{artifact}:{version})")
    name = f"{group}:{artifact}"
    managed = dict(model.managed)
    picked: dict[str, str] = {}
    for g, a, v in model.dependencies:
        if not g or not a or _implicit(g) or _implicit(a):
            report.skipped_unresolvable += 1
            report.warn(locator, f"dependency without usable coordinates ({g}:{a})")
            continue
        dep_name = f"{g}:{a}"
        if v is None:
            v = managed.get((g, a))
        if v is None or _unusable_version(v):
            report.skipped_implicit_versions += 1
            report.warn(locator, f"dependency {dep_name} has no explicit version ({v})")
            continue
        if dep_name == name:
            report.warn(locator, f"self dependency {dep_name} ignored")
            continue
        if dep_name in picked:
            if picked[dep_name] != v:
                report.warn(locator, f"{dep_name} declared with versions {picked[dep_name]} and {v}; kept the first")
            continue
        picked[dep_name] = v
    return ManifestRecord(name, version, artifact_time, tuple(NodeKey(n, v) for n, v in picked.items()))


def parse_pom(
    xml: str | bytes,
    artifact_time: datetime,
    *,
    parent: PomModel | None = None,
    report: IngestReport | None = None,
    locator: str = "<pom>",
) -> ManifestRecord:
    """Parse one POM into a record named ``groupId:artifactId``."""
    model = read_pom(xml)
    if parent is not None:
        model = resolve_parent(model, parent)
    return pom_to_record(model, artifact_time, report=report, locator=locator)


def read_time_index(path: str | os.PathLike) -> dict[str, datetime]:
    """Read a ``path,ISO-timestamp`` CSV; an optional header row is skipped."""
    index = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or row[0].startswith("#"):
                continue
            if len(row) != 2:
                raise FatalSyntax(f"{path}:{lineno}: expected path,timestamp")
            try:
                index[row[0].strip()] = parse_time(row[1])
            except ValueError:
                if lineno == 1:
                    continue
                raise FatalSyntax(f"{path}:{lineno}: bad timestamp {row[1]!r}") from None
    return index


def _is_pom(path: Path) -> bool:
    return path.is_file() and (path.name == "pom.xml" or path.suffix == ".pom")


def load_pom_tree(
    root: str | os.PathLike,
    time_index: dict[str, datetime] | None = None,
    report: IngestReport | None = None,
) -> list[ManifestRecord]:
    """Walk ``root`` for ``*.pom``/``pom.xml`` files and turn each into a record.

    Parents are resolved one level deep when the parent POM is part of the
    tree. Artifact times come from ``time_index`` (keyed by path relative to
    ``root`` or absolute path), falling back to file modification time.
    """
    root = Path(root)
    report = report if report is not None else IngestReport()
    time_index = time_index or {}
    models: list[tuple[Path, PomModel]] = []
    for path in sorted(p for p in root.rglob("*") if _is_pom(p)):
        try:
            models.append((path, read_pom(path.read_bytes())))
        except MalformedXml as exc:
            report.warn(str(path), f"malformed POM skipped: {exc}")
    by_coord = {m.coordinates: m for _, m in models}

    records = []
    for path, model in models:
        locator = str(path)
        if model.parent is not None and tuple(model.parent) in by_coord:
            model = resolve_parent(model, by_coord[tuple(model.parent)])
        rel = path.relative_to(root).as_posix()
        when = time_index.get(rel) or time_index.get(str(path)) or time_index.get(str(path.resolve()))
        if when is None:
            when = datetime.fromtimestamp(path.stat().st_mtime, tz=timezone.utc)
            report.times_from_mtime += 1
            report.warn(locator, "no upload time indexed; used file modification time")
        try:
            records.append(pom_to_record(model, when, report=report, locator=locator))
        except MissingCoordinates as exc:
            report.warn(locator, f"POM skipped: {exc}")
    return records
