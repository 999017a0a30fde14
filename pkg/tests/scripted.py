"""A 25-event scripted session shared by the driver and acceptance tests.

Event budget: 1 session_created + 4 expansions + 1 clustering + 3 pins +
2 annotations + 1 custom link + 1 removal, padded to 25 with moves, an
unpin, and insights lookups. Nodes present after the expansions (given
the corpus tables): seeds gs01/qo01/pf01, thematic gs02..gs04, forward
citers gs05/gs10 of qo01, and nothing else.
"""

from __future__ import annotations

from litforage.driver import SessionDriver
from litforage.metadata import ProviderConfig, ScholarClient
from litforage.session import Modality, SessionStore

from corpus import SEED_IDS


class Clock:
    def __init__(self, start=1_000_000):
        self.t = start

    def tick(self, ms=1500):
        self.t += ms
        return self.t


def scripted_session(corpus, base_path, name="rec"):
    store = SessionStore(base_path / name)
    client = ScholarClient(ProviderConfig.fixtures(corpus.root))
    driver = SessionDriver.create(SEED_IDS, "scripted review", client,
                                  1_000_000, store=store, session_id="rec1",
                                  rng_seed=7)
    clock = Clock()
    gs_author = driver.doc.nodes["gs01"].authors[0].author_id
    commands = [
        # 4 expansions
        ({"type": "expand", "mode": "thematic", "seeds": ["gs01"], "k": 3},
         Modality.MENU),
        ({"type": "expand", "mode": "citations", "id": "qo01", "k": 2},
         Modality.MENU),
        ({"type": "expand", "mode": "references", "id": "gs03", "k": 2},
         Modality.MENU),
        ({"type": "expand", "mode": "author", "id": "gs01",
          "author_id": gs_author, "k": 2}, Modality.MENU),
        # 1 clustering
        ({"type": "cluster", "k": 3}, Modality.POINTER_GESTURE),
        # 3 pins
        ({"type": "pin", "id": "gs01", "pos": [5.0, 1.0, -2.0]},
         Modality.POINTER_GESTURE),
        ({"type": "pin", "id": "qo01", "pos": [-14.0, 3.0, 8.0]},
         Modality.POINTER_GESTURE),
        ({"type": "pin", "id": "pf01", "pos": [2.0, -9.0, 4.0]},
         Modality.POINTER_GESTURE),
        # 2 annotations
        ({"type": "annotate", "id": "gs01", "text": "core reference"},
         Modality.MENU),
        ({"type": "annotate", "id": "pf01", "text": "method transfers?"},
         Modality.MENU),
        # 1 custom link
        ({"type": "link", "a": "gs01", "b": "pf01"},
         Modality.POINTER_GESTURE),
        # 1 removal
        ({"type": "remove", "id": "gs10"}, Modality.MENU),
        # padding: 3 insights, 1 unpin, 8 moves
        ({"type": "insights", "id": "gs01", "kind": "tldr"}, Modality.MENU),
        ({"type": "insights", "id": "gs01", "kind": "keywords"},
         Modality.MENU),
        ({"type": "insights", "id": "pf01", "kind": "tldr"}, Modality.MENU),
        ({"type": "unpin", "id": "pf01"}, Modality.POINTER_GESTURE),
        ({"type": "move", "id": "pf01", "pos": [2.5, -9.0, 4.0]},
         Modality.POINTER_GESTURE),
        ({"type": "move", "id": "gs02", "pos": [1.0, 1.0, 1.0]},
         Modality.POINTER_GESTURE),
        ({"type": "move", "id": "gs02", "pos": [2.0, 2.0, 2.0]},
         Modality.POINTER_GESTURE),
        ({"type": "move", "id": "gs03", "pos": [0.0, 12.0, 0.0]},
         Modality.POINTER_GESTURE),
        ({"type": "move", "id": "gs04", "pos": [3.0, 3.0, 3.0]},
         Modality.POINTER_GESTURE),
        ({"type": "move", "id": "gs05", "pos": [-4.0, 0.0, 6.0]},
         Modality.POINTER_GESTURE),
        ({"type": "move", "id": "qo01", "pos": [-15.0, 3.0, 8.0]},
         Modality.POINTER_GESTURE),
        ({"type": "move", "id": "gs01", "pos": [5.5, 1.0, -2.0]},
         Modality.POINTER_GESTURE),
    ]
    for command, modality in commands:
        driver.execute(command, modality, clock.tick())
    driver.close(clock.tick())
    return store, driver
