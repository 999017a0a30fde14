"""litforage: a literature-foraging engine.

Typed paper graph, deterministic 3D force layout, recommendation-driven
expansion against a scholarly-metadata provider, content insights,
append-only interaction logs with exact replay, and a streaming session
service with a CLI driver.
"""

__version__ = "0.1.0"
