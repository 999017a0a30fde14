import json

import pytest

from litforage.errors import (
    IntegrityError,
    MigrationError,
    NotFoundError,
    ValidationError,
)
from litforage.graph import (
    Annotation,
    Author,
    ClusterAssignment,
    EDGE_COLORS,
    EdgeKind,
    GraphDocument,
    PaperNode,
    Provenance,
    TypedEdge,
    new_document,
    structurally_equal,
)

from conftest import make_paper


def small_doc(n=3, seed=5):
    doc = new_document(topic="t", created_at=10, rng_seed=seed)
    for i in range(n):
        doc.add_node(make_paper("p%d" % i), 10)
    return doc


class TestAddNode:
    def test_insert_fresh(self):
        doc = new_document()
        report = doc.add_node(make_paper("a"))
        assert report.action == "inserted"
        assert len(doc.nodes) == 1
        assert "a" in doc.layout.positions

    def test_insert_same_id_twice_is_idempotent(self):
        doc = new_document()
        node = make_paper("a", abstract="stored")
        doc.add_node(node)
        report = doc.add_node(make_paper("a", abstract="stored"))
        assert report.action == "already_present"
        assert len(doc.nodes) == 1

    def test_enrichment_fills_absent_fields_only(self):
        doc = new_document()
        doc.add_node(make_paper("a", title="kept title"))
        richer = PaperNode(
            id="a", title="different title", abstract="late abstract",
            year=2020, authors=[Author("X", "ax")],
            external_ids={"DOI": "10.1/x"})
        report = doc.add_node(richer)
        assert report.action == "enriched"
        stored = doc.nodes["a"]
        # hand-built expectation: only previously-absent fields filled
        assert stored.title == "kept title"
        assert stored.abstract == "late abstract"
        assert stored.year == 2020
        assert stored.authors == [Author("X", "ax")]
        assert stored.external_ids == {"DOI": "10.1/x"}

    def test_enrichment_never_overwrites(self):
        doc = new_document()
        doc.add_node(make_paper("a", abstract="first", year=1999))
        doc.add_node(make_paper("a", abstract="second", year=2024))
        assert doc.nodes["a"].abstract == "first"
        assert doc.nodes["a"].year == 1999

    def test_empty_title_rejected(self):
        doc = new_document()
        with pytest.raises(ValidationError):
            doc.add_node(PaperNode(id="a", title=""))

    def test_empty_id_rejected(self):
        doc = new_document()
        with pytest.raises(ValidationError):
            doc.add_node(PaperNode(id="", title="x"))


class TestAddEdge:
    def test_edge_to_absent_node_is_integrity_error(self):
        doc = small_doc()
        with pytest.raises(IntegrityError):
            doc.add_edge(TypedEdge("p0", "ghost", EdgeKind.THEMATIC, 0.5,
                                   Provenance.PROVIDER_RECOMMENDATION))

    def test_self_loop_rejected(self):
        doc = small_doc()
        with pytest.raises(ValidationError):
            doc.add_edge(TypedEdge("p0", "p0", EdgeKind.CUSTOM))

    def test_citation_color_is_magenta(self):
        doc = small_doc()
        doc.add_edge(TypedEdge("p0", "p1", EdgeKind.CITATION, 1.0,
                               Provenance.CITATION_GRAPH))
        assert doc.edges[0].color == "magenta"

    def test_duplicate_merges_to_max_weight(self):
        doc = small_doc()
        doc.add_edge(TypedEdge("p0", "p1", EdgeKind.THEMATIC, 0.4,
                               Provenance.PROVIDER_RECOMMENDATION))
        report = doc.add_edge(TypedEdge("p1", "p0", EdgeKind.THEMATIC, 0.7,
                                        Provenance.PROVIDER_RECOMMENDATION))
        assert report.action == "merged"
        assert len(doc.edges) == 1
        assert doc.edges[0].weight == 0.7

    def test_merge_never_lowers_weight(self):
        doc = small_doc()
        doc.add_edge(TypedEdge("p0", "p1", EdgeKind.THEMATIC, 0.7,
                               Provenance.PROVIDER_RECOMMENDATION))
        doc.add_edge(TypedEdge("p0", "p1", EdgeKind.THEMATIC, 0.4,
                               Provenance.PROVIDER_RECOMMENDATION))
        assert doc.edges[0].weight == 0.7

    def test_weight_out_of_range_rejected(self):
        doc = small_doc()
        with pytest.raises(ValidationError):
            doc.add_edge(TypedEdge("p0", "p1", EdgeKind.THEMATIC, 1.5,
                                   Provenance.PROVIDER_RECOMMENDATION))


class TestCustomLink:
    def test_link_creates_green_custom_edge(self):
        doc = small_doc()
        doc.create_custom_link("p0", "p1")
        edge = doc.edges[0]
        assert edge.kind is EdgeKind.CUSTOM
        assert edge.color == "green"
        assert edge.weight == 1.0
        assert edge.provenance is Provenance.USER_CREATED

    def test_repeat_link_is_idempotent(self):
        doc = small_doc()
        doc.create_custom_link("p0", "p1")
        before = doc.to_dict()
        doc.create_custom_link("p0", "p1")
        assert doc.to_dict() == before

    def test_link_coexists_with_citation(self):
        # per-kind uniqueness checked by hand: same pair, two kinds
        doc = small_doc()
        doc.add_edge(TypedEdge("p0", "p1", EdgeKind.CITATION, 1.0,
                               Provenance.CITATION_GRAPH))
        doc.create_custom_link("p0", "p1")
        assert len(doc.edges) == 2
        assert {e.kind for e in doc.edges} == {EdgeKind.CITATION,
                                               EdgeKind.CUSTOM}

    def test_self_link_rejected(self):
        doc = small_doc()
        with pytest.raises(ValidationError):
            doc.create_custom_link("p0", "p0")


class TestRemoveNode:
    def test_incident_edges_removed(self):
        doc = small_doc(4)
        doc.add_edge(TypedEdge("p0", "p1", EdgeKind.THEMATIC, 0.5,
                               Provenance.PROVIDER_RECOMMENDATION))
        doc.add_edge(TypedEdge("p0", "p2", EdgeKind.CITATION, 1.0,
                               Provenance.CITATION_GRAPH))
        doc.add_edge(TypedEdge("p3", "p0", EdgeKind.AUTHORSHIP, 1.0,
                               Provenance.AUTHOR_GRAPH))
        doc.add_edge(TypedEdge("p1", "p2", EdgeKind.THEMATIC, 0.5,
                               Provenance.PROVIDER_RECOMMENDATION))
        report = doc.remove_node("p0")
        assert report.detail["edges_removed"] == 3
        assert len(doc.edges) == 1

    def test_sole_member_cluster_deleted(self):
        doc = small_doc(3)
        doc.clusters = [
            ClusterAssignment(0, "solo", ["p0"], (0.0, 0.0, 0.0)),
            ClusterAssignment(1, "pair", ["p1", "p2"], (1.0, 0.0, 0.0)),
        ]
        doc.remove_node("p0")
        assert [c.cluster_id for c in doc.clusters] == [1]

    def test_annotations_and_layout_cleaned(self):
        doc = small_doc(2)
        doc.add_annotation("p0", "note", 11)
        doc.layout.pins["p0"] = (1.0, 2.0, 3.0)
        doc.remove_node("p0")
        assert doc.annotations == []
        assert "p0" not in doc.layout.positions
        assert "p0" not in doc.layout.pins
        assert doc.validate() == []

    def test_absent_id_not_found(self):
        doc = small_doc()
        with pytest.raises(NotFoundError):
            doc.remove_node("ghost")

    def test_add_then_remove_restores_sets(self):
        doc = small_doc(3)
        doc.add_edge(TypedEdge("p0", "p1", EdgeKind.THEMATIC, 0.5,
                               Provenance.PROVIDER_RECOMMENDATION))
        nodes_before = set(doc.nodes)
        edges_before = [e.to_dict() for e in doc.edges]
        doc.add_node(make_paper("fresh"))
        doc.remove_node("fresh")
        assert set(doc.nodes) == nodes_before
        assert [e.to_dict() for e in doc.edges] == edges_before


class TestValidate:
    def test_fresh_document_validates(self):
        assert small_doc().validate() == []

    def test_hand_corrupted_edge_named(self):
        doc = small_doc()
        doc.edges.append(TypedEdge("p0", "ghost", EdgeKind.THEMATIC, 0.5,
                                   Provenance.PROVIDER_RECOMMENDATION))
        violations = doc.validate()
        assert len(violations) == 1
        assert violations[0].code == "dangling_edge"
        assert "ghost" in violations[0].message

    def test_node_in_two_clusters_is_partition_violation(self):
        doc = small_doc(3)
        doc.clusters = [
            ClusterAssignment(0, "a", ["p0", "p1"], (0.0, 0.0, 0.0)),
            ClusterAssignment(1, "b", ["p1", "p2"], (1.0, 0.0, 0.0)),
        ]
        codes = [v.code for v in doc.validate()]
        assert codes == ["overlapping_clusters"]

    def test_dangling_annotation_flagged(self):
        doc = small_doc()
        doc.annotations.append(Annotation("x", "ghost", "hm", 5))
        assert any(v.code == "dangling_annotation" for v in doc.validate())

    def test_operations_preserve_validity(self):
        doc = small_doc(5)
        doc.add_edge(TypedEdge("p0", "p1", EdgeKind.THEMATIC, 0.3,
                               Provenance.PROVIDER_RECOMMENDATION))
        doc.create_custom_link("p2", "p3")
        doc.add_annotation("p4", "useful", 20)
        doc.remove_node("p1")
        assert doc.validate() == []


class TestColors:
    def test_color_mapping_is_total_and_fixed(self):
        assert {k: v for k, v in EDGE_COLORS.items()} == {
            EdgeKind.THEMATIC: "white",
            EdgeKind.CITATION: "magenta",
            EdgeKind.AUTHORSHIP: "yellow",
            EdgeKind.CUSTOM: "green",
        }
        assert len(EdgeKind) == 4
        for kind in EdgeKind:
            assert kind.color in {"white", "magenta", "yellow", "green"}


class TestSerialization:
    def test_round_trip_structural_equality(self):
        doc = small_doc(4)
        doc.add_edge(TypedEdge("p0", "p1", EdgeKind.CITATION, 1.0,
                               Provenance.CITATION_GRAPH))
        doc.add_annotation("p2", "note", 30)
        doc.clusters = [ClusterAssignment(0, "c", ["p0", "p3"],
                                          (5.0, -1.0, 2.0))]
        loaded = GraphDocument.from_dict(
            json.loads(doc.to_canonical_json()))
        assert structurally_equal(doc, loaded)

    def test_schema_version_leads_serialization(self):
        doc = small_doc()
        assert doc.to_canonical_json().startswith(b'{"schema_version":1,')

    def test_unknown_schema_version_is_migration_error(self):
        doc = small_doc()
        payload = json.loads(doc.to_canonical_json())
        payload["schema_version"] = 99
        with pytest.raises(MigrationError):
            GraphDocument.from_dict(payload)

    def test_serialization_is_byte_stable(self):
        doc = small_doc(4)
        doc.create_custom_link("p0", "p3")
        assert doc.to_canonical_json() == doc.to_canonical_json()
