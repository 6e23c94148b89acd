import io
import random
from datetime import timedelta

import pytest

import oracles
from conftest import day
from sugraph import NodeKey
from sugraph.errors import FatalSyntax, MalformedXml, MissingCoordinates, ParentMismatch
from sugraph.ingest import (
    IngestReport,
    ManifestRecord,
    build_universe,
    format_record,
    load_pom_tree,
    parse_pom,
    parse_universe_file,
    read_pom,
    read_time_index,
    resolve_parent,
    universe_records,
    version_sort_key,
    write_records,
)

NS = 'xmlns="http://maven.apache.org/POM/4.0.0"'


def pom(group, artifact, version, deps=(), parent=None, managed=()):
    def dep(g, a, v):
        ver = f"<version>{v}</version>" if v is not None else ""
        return f"<dependency><groupId>{g}</groupId><artifactId>{a}</artifactId>{ver}</dependency>"

    parts = [f"<project {NS}>", "<modelVersion>4.0.0</modelVersion>"]
    if parent:
        parts.append(
            f"<parent><groupId>{parent[0]}</groupId><artifactId>{parent[1]}</artifactId>"
            f"<version>{parent[2]}</version></parent>"
        )
    if group:
        parts.append(f"<groupId>{group}</groupId>")
    if artifact:
        parts.append(f"<artifactId>{artifact}</artifactId>")
    if version:
        parts.append(f"<version>{version}</version>")
    if managed:
        parts.append("<dependencyManagement><dependencies>")
        parts += [dep(*m) for m in managed]
        parts.append("</dependencies></dependencyManagement>")
    if deps:
        parts.append("<dependencies>" + "".join(dep(*d) for d in deps) + "</dependencies>")
    parts.append("</project>")
    return "\n".join(parts)


class TestUniverseFile:
    def test_one_line(self):
        recs = parse_universe_file(['{"name":"a","release":"1","time":"2020-01-01","deps":["x@1"]}'])
        assert recs == [ManifestRecord("a", "1", day("2020-01-01"), (NodeKey("x", "1"),))]

    def test_empty(self):
        assert parse_universe_file([]) == []

    def test_duplicate_deps(self):
        report = IngestReport()
        recs = parse_universe_file(['{"name":"a","release":"1","time":"2020-01-01","deps":["x@1","x@1"]}'], report=report)
        assert len(recs) == 1 and recs[0].deps == (NodeKey("x", "1"),)
        assert len(report.warnings) == 1

    def test_comments_and_blank_lines(self):
        lines = ["# hello", "", '{"name":"a","release":"1","time":"2020-01-01T10:00:00Z","deps":[]}']
        (rec,) = parse_universe_file(lines)
        assert rec.time == day("2020-01-01") + timedelta(hours=10)

    @pytest.mark.parametrize(
        "line",
        [
            "not json",
            "[1, 2]",
            '{"name":"a","release":"1","time":"2020-01-01"}',
            '{"name":"a","release":"1","time":"yesterday","deps":[]}',
            '{"name":"a","release":"1","time":"2020-01-01","deps":["nodash"]}',
            '{"name":"","release":"1","time":"2020-01-01","deps":[]}',
            '{"name":"a","release":"1","time":"2020-01-01","deps":[],"extra":1}',
        ],
    )
    def test_malformed(self, line):
        report = IngestReport()
        assert parse_universe_file([line], report=report) == []
        assert len(report.warnings) == 1
        with pytest.raises(FatalSyntax):
            parse_universe_file([line], strict=True)

    def test_version_header(self):
        assert parse_universe_file(["# sugraph-universe 1"]) == []
        with pytest.raises(FatalSyntax):
            parse_universe_file(["# sugraph-universe 2"])

    def test_round_trip_100(self):
        rng = random.Random(7)
        records = []
        for i in range(100):
            when = oracles.BASE + timedelta(days=rng.randrange(4000), milliseconds=rng.choice([0, 0, 1234567]))
            deps = tuple(NodeKey(f"lib{rng.randrange(20)}", f"{rng.randrange(5)}.0") for _ in range(rng.randrange(4)))
            records.append(ManifestRecord(f"p{i % 13}", f"{i}.{rng.randrange(9)}", when, deps))
        buf = io.StringIO()
        write_records(records, buf)
        first = parse_universe_file(io.StringIO(buf.getvalue()), strict=True)
        buf2 = io.StringIO()
        write_records(first, buf2)
        second = parse_universe_file(io.StringIO(buf2.getvalue()), strict=True)
        assert first == records == second
        assert buf.getvalue() == buf2.getvalue()

    def test_format_record(self):
        rec = ManifestRecord("a", "1", day("2020-01-01"), (NodeKey("x", "1"),))
        assert format_record(rec) == '{"name":"a","release":"1","time":"2020-01-01","deps":["x@1"]}'


class TestBuild:
    def test_update_edges_inferred(self):
        recs = [ManifestRecord("a", "2", day("2020-02-01")), ManifestRecord("a", "1", day("2020-01-01"))]
        u, report = build_universe(recs)
        assert u.up_edges == {(NodeKey("a", "1"), NodeKey("a", "2"))}
        assert report.up_edges_created == 1

    def test_dangling(self):
        u, report = build_universe([ManifestRecord("a", "1", day("2020-01-01"), (NodeKey("ghost", "1"),))])
        assert u.n_dep_edges == 0 and report.skipped_unresolvable == 1

    def test_equal_time_ordered_by_version(self):
        recs = [ManifestRecord("a", v, day("2020-01-01")) for v in ("1.10", "1.9", "1.2")]
        u, _ = build_universe(recs)
        assert [k.release for k in u.chain(NodeKey("a", "1.9"))] == ["1.2", "1.9", "1.10"]

    def test_duplicate_keys(self):
        recs = [
            ManifestRecord("a", "1", day("2020-03-01")),
            ManifestRecord("a", "1", day("2020-01-01")),
        ]
        u, report = build_universe(recs)
        assert len(u) == 1 and u.node(("a", "1")).time == day("2020-01-01")
        assert report.nodes_created == 1 and report.records_read == 2 and report.warnings

    def test_shuffle_invariance(self):
        raw = oracles.random_raw(random.Random(3), max_nodes=50)
        base = universe_records(raw.universe())
        ref, _ = build_universe(base)
        rng = random.Random(11)
        for _ in range(20):
            recs = list(base)
            rng.shuffle(recs)
            assert build_universe(recs)[0] == ref

    def test_every_edge_from_one_declaration(self):
        raw = oracles.random_raw(random.Random(5), max_nodes=40)
        records = universe_records(raw.universe())
        u, report = build_universe(records)
        declared = {(r.key, d) for r in records for d in r.deps}
        assert u.dep_edges == declared
        assert report.dep_edges_created == sum(len(r.deps) for r in records)

    def test_version_sort_key(self):
        assert sorted(["1.10", "1.9", "1.9.1", "2.0-beta"], key=version_sort_key) == ["1.9", "1.9.1", "1.10", "2.0-beta"]


class TestPom:
    T = day("2012-11-14")

    def test_junit(self):
        rec = parse_pom(pom("junit", "junit", "4.11"), self.T)
        assert (rec.name, rec.release, rec.time, rec.deps) == ("junit:junit", "4.11", self.T, ())

    def test_dependencies(self):
        rec = parse_pom(pom("g", "a", "1", deps=[("junit", "junit", "4.11"), ("commons-io", "commons-io", "2.0")]), self.T)
        assert rec.deps == (NodeKey("junit:junit", "4.11"), NodeKey("commons-io:commons-io", "2.0"))

    @pytest.mark.parametrize("version", ["${library.version}", "SNAPSHOT", "1.0-SNAPSHOT", "latest", "LATEST", "RELEASE", "[1.0,2.0)", None])
    def test_implicit_versions_skipped(self, version):
        report = IngestReport()
        rec = parse_pom(pom("g", "a", "1", deps=[("x", "y", version)]), self.T, report=report)
        assert rec.deps == () and report.skipped_implicit_versions == 1

    def test_multiple_versions_keep_first(self):
        report = IngestReport()
        rec = parse_pom(pom("g", "a", "1", deps=[("x", "y", "1"), ("x", "y", "2")]), self.T, report=report)
        assert rec.deps == (NodeKey("x:y", "1"),) and report.warnings

    def test_own_dependency_management(self):
        rec = parse_pom(pom("g", "a", "1", deps=[("x", "y", None)], managed=[("x", "y", "3")]), self.T)
        assert rec.deps == (NodeKey("x:y", "3"),)

    def test_malformed(self):
        with pytest.raises(MalformedXml):
            parse_pom("<project><groupId>", self.T)
        with pytest.raises(MalformedXml):
            parse_pom("<settings/>", self.T)

    def test_missing_coordinates(self):
        with pytest.raises(MissingCoordinates):
            parse_pom(pom(None, "a", "1"), self.T)
        with pytest.raises(MissingCoordinates):
            parse_pom(pom("g", "a", "${revision}"), self.T)

    def test_parent_inheritance(self):
        parent = read_pom(pom("org.apache", "parent", "5", managed=[("commons-io", "commons-io", "2.0")]))
        child = read_pom(pom(None, "lib", "1.0", deps=[("commons-io", "commons-io", None)], parent=("org.apache", "parent", "5")))
        resolved = resolve_parent(child, parent)
        rec = parse_pom(pom(None, "lib", "1.0", deps=[("commons-io", "commons-io", None)], parent=("org.apache", "parent", "5")),
                        self.T, parent=parent)
        assert resolved.group_id == "org.apache"
        assert rec.name == "org.apache:lib"
        assert rec.deps == (NodeKey("commons-io:commons-io", "2.0"),)

    def test_parent_mismatch(self):
        parent = read_pom(pom("org.apache", "parent", "5"))
        child = read_pom(pom(None, "lib", "1.0", parent=("org.apache", "parent", "6")))
        with pytest.raises(ParentMismatch):
            resolve_parent(child, parent)
        with pytest.raises(ParentMismatch):
            resolve_parent(read_pom(pom("g", "a", "1")), parent)


def write_tree(root):
    files = {
        "org/apache/parent/5/parent-5.pom": pom(
            "org.apache", "parent", "5", managed=[("commons-io", "commons-io", "2.0")]
        ),
        "org/apache/lib/1.0/pom.xml": pom(
            None,
            "lib",
            "1.0",
            parent=("org.apache", "parent", "5"),
            deps=[
                ("commons-io", "commons-io", None),
                ("junit", "junit", "4.11"),
                ("foo", "foo", "${foo.version}"),
                ("bar", "bar", "1.0-SNAPSHOT"),
                ("baz", "baz", "latest"),
                ("ghost", "ghost", "9"),
            ],
        ),
        "commons-io/commons-io/2.0/commons-io-2.0.pom": pom("commons-io", "commons-io", "2.0"),
        "junit/junit/4.11/junit-4.11.pom": pom("junit", "junit", "4.11"),
        "junk/broken.pom": "<project><oops",
        "README.txt": "not a pom",
    }
    for rel, text in files.items():
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    index = root / "times.csv"
    index.write_text(
        "path,time\n"
        "org/apache/parent/5/parent-5.pom,2010-01-01\n"
        "org/apache/lib/1.0/pom.xml,2011-01-01\n"
        "commons-io/commons-io/2.0/commons-io-2.0.pom,2010-10-27\n"
        "junit/junit/4.11/junit-4.11.pom,2012-11-14\n"
    )
    return index


EXPECTED_COUNTS = dict(
    records_read=4,
    nodes_created=4,
    dep_edges_created=2,
    up_edges_created=0,
    skipped_implicit_versions=3,
    skipped_unresolvable=1,
)


def ingest_tree(tmp_path):
    index = write_tree(tmp_path)
    report = IngestReport()
    records = load_pom_tree(tmp_path, read_time_index(index), report)
    return build_universe(records, report)


def test_pom_tree(tmp_path):
    u, report = ingest_tree(tmp_path)
    for field, value in EXPECTED_COUNTS.items():
        assert getattr(report, field) == value, field
    assert u.depend(("org.apache:lib", "1.0")) == {("commons-io:commons-io", "2.0"), ("junit:junit", "4.11")}
    assert u.node(("junit:junit", "4.11")).time == day("2012-11-14")
    assert report.times_from_mtime == 0
    assert any("broken.pom" in loc for loc, _ in report.warnings)


def test_pom_tree_mtime_fallback(tmp_path):
    write_tree(tmp_path)
    report = IngestReport()
    records = load_pom_tree(tmp_path, None, report)
    assert len(records) == 4 and report.times_from_mtime == 4
