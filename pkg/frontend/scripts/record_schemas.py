"""Record the command payload schemas the session service accepts.

Each example below is executed against a real driver over the test
fixture corpus before being written out, so the recorded contract is a
set of proven-accepted payloads, not hand-maintained documentation.

Run from the repository root:

    python frontend/scripts/record_schemas.py
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(REPO / "tests"))

from corpus import SEED_IDS, build_corpus  # noqa: E402

from litforage.driver import SessionDriver  # noqa: E402
from litforage.metadata import ProviderConfig, ScholarClient  # noqa: E402
from litforage.session import Modality  # noqa: E402

OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / \
    "command_schemas.json"


def main() -> None:
    corpus_dir = tempfile.mkdtemp()
    build_corpus(corpus_dir)
    client = ScholarClient(ProviderConfig.fixtures(corpus_dir))
    driver = SessionDriver.create(SEED_IDS, "schema recording", client,
                                  1_000_000, rng_seed=1, run_cap=5)
    author_id = driver.doc.nodes["gs01"].authors[0].author_id

    examples = {
        "expand_thematic": {"type": "expand", "mode": "thematic",
                            "seeds": ["gs01"], "k": 5},
        "expand_citations": {"type": "expand", "mode": "citations",
                             "id": "gs01", "k": 5},
        "expand_references": {"type": "expand", "mode": "references",
                              "id": "gs01", "k": 5},
        "expand_author": {"type": "expand", "mode": "author", "id": "gs01",
                          "author_id": author_id, "k": 5},
        "cluster": {"type": "cluster", "k": 2},
        "pin": {"type": "pin", "id": "gs01", "pos": [1.0, 2.0, 3.0]},
        "move": {"type": "move", "id": "gs01", "pos": [1.5, 2.0, 3.0]},
        "unpin": {"type": "unpin", "id": "gs01"},
        "link": {"type": "link", "a": "gs01", "b": "qo01"},
        "annotate": {"type": "annotate", "id": "gs01", "text": "a note"},
        "insights_tldr": {"type": "insights", "id": "gs01", "kind": "tldr"},
        "insights_keywords": {"type": "insights", "id": "gs01",
                              "kind": "keywords", "k": 5},
        "remove": {"type": "remove", "id": "qo01"},
    }

    now = 2_000_000
    for name, command in examples.items():
        now += 1000
        driver.execute(dict(command), Modality.MENU, now)

    schemas = {
        name: {
            "payload": command,
            "fields": sorted(command.keys()),
            "field_types": {key: type(value).__name__
                            for key, value in command.items()},
        }
        for name, command in examples.items()
    }
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(schemas, indent=2, sort_keys=True) + "\n")
    print("recorded %d accepted command schemas -> %s" % (len(schemas), OUT))


if __name__ == "__main__":
    main()
