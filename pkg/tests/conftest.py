import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from corpus import SEED_IDS, build_corpus  # noqa: E402

from litforage.graph import PaperNode, new_document  # noqa: E402
from litforage.metadata import ProviderConfig, ScholarClient  # noqa: E402

# Multi-seed recommendation requests exercised by tests; the corpus
# builder must pre-record a fixture for each.
REC_SEED_SETS = [
    ["gs01", "qo01"],
    ["gs01", "pf01"],
    ["gs01", "qo01", "pf01"],
]


@pytest.fixture(scope="session")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    return build_corpus(root, extra_rec_seed_sets=REC_SEED_SETS)


@pytest.fixture()
def fixture_client(corpus):
    return ScholarClient(ProviderConfig.fixtures(corpus.root))


@pytest.fixture()
def seeded_doc(corpus, fixture_client):
    """Document holding the three standard seeds, positions initialized."""
    from litforage.layout import init_positions

    doc = new_document(topic="fixture review", created_at=1000, rng_seed=77)
    for seed_id in SEED_IDS:
        record = fixture_client.get_paper(seed_id)
        doc.add_node(record.to_node(is_seed=True), 1000)
    doc.layout = init_positions(doc, 77)
    return doc


def make_paper(pid: str, title: str | None = None, **kw) -> PaperNode:
    return PaperNode(id=pid, title=title or ("paper " + pid), **kw)
