"""Content analysis: summaries, keywords, embeddings, thematic clustering.

The deterministic stub path is the contract-bearing implementation and
the test default: first-sentence summaries, frequency keywords, signed
feature-hash embeddings, and seeded k-means with silhouette-chosen k.
A remote LLM provider can replace the text generation; when it fails,
answers fall back to the stub and carry a fallback flag.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import TYPE_CHECKING

import httpx
import numpy as np

from .canonical import stable_hash64
from .errors import ProviderError, ValidationError
from .layout import DECLINATION_ANGLE, GOLDEN_ANGLE, Vec3

if TYPE_CHECKING:  # pragma: no cover
    from .graph import ClusterAssignment, GraphDocument, PaperNode

EMBED_DIM = 256
ANCHOR_RADIUS = 150.0
AUTO_K_CAP = 8
KMEANS_RESTARTS = 10
KMEANS_MAX_ITER = 100
SUMMARY_LIMIT = 200

LLM_KEY_ENV = "LITFORAGE_LLM_API_KEY"

_WORD_RE = re.compile(r"[a-z0-9]+(?:'[a-z]+)?")

# Fixed embedded stop list; keywords and cluster labels ignore these.
STOP_WORDS = frozenset("""
a an and are as at be been but by for from has have in into is it its of on
or that the their these this those to was we were which will with our not
can such using based new towards toward via i you he she they them his her
do does did also than then there here more most other others over under
""".split())


def tokenize(text: str) -> list[str]:
    return _WORD_RE.findall(text.lower())


def content_tokens(text: str) -> list[str]:
    return [t for t in tokenize(text) if t not in STOP_WORDS]


class ProviderKind(str, Enum):
    REMOTE_LLM = "remote_llm"
    DETERMINISTIC_STUB = "deterministic_stub"


@dataclass
class InsightProvider:
    """Where generated text comes from; the stub needs no credentials."""

    kind: ProviderKind = ProviderKind.DETERMINISTIC_STUB
    model_name: str = "stub"
    timeout: float = 30.0
    api_url: str = "https://generativelanguage.googleapis.com/v1beta/models"
    api_key: str | None = None
    transport: httpx.BaseTransport | None = None

    def complete(self, prompt: str) -> str:
        """One remote completion; raises ProviderError on any failure."""
        import os

        key = self.api_key or os.environ.get(LLM_KEY_ENV)
        url = "%s/%s:generateContent" % (self.api_url.rstrip("/"), self.model_name)
        try:
            with httpx.Client(transport=self.transport,
                              timeout=self.timeout) as client:
                resp = client.post(
                    url,
                    params={"key": key} if key else None,
                    json={"contents": [{"parts": [{"text": prompt}]}]},
                )
        except httpx.HTTPError as exc:
            raise ProviderError("completion failed: %s" % exc) from exc
        if resp.status_code >= 400:
            raise ProviderError("completion failed with HTTP %d" % resp.status_code)
        data = resp.json()
        try:
            return data["candidates"][0]["content"]["parts"][0]["text"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError("malformed completion payload") from exc


def _prompt(name: str, **values: str) -> str:
    text = resources.files("litforage").joinpath("prompts", name).read_text("utf-8")
    return text.format(**values)


@dataclass
class Answer:
    """A generated value plus whether the stub had to stand in."""

    value: object
    fallback: bool = False


# -- embeddings ---------------------------------------------------------------


def embed(text: str) -> np.ndarray:
    """Signed feature-hash embedding, L2-normalized, 256 buckets.

    Deterministic function of the token multiset: each token occurrence
    adds +/-1 to one bucket, so one added token perturbs exactly one
    pre-normalization component.
    """
    vec = np.zeros(EMBED_DIM)
    tokens = tokenize(text)
    if not tokens:
        vec[0] = 1.0
        return vec
    for token in tokens:
        h = stable_hash64("embed", token)
        bucket = h & (EMBED_DIM - 1)
        vec[bucket] += 1.0 if (h >> 8) & 1 else -1.0
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        vec[0] = 1.0
        return vec
    return vec / norm


def embed_bucket(token: str) -> int:
    """Bucket a single token hashes to (exposed for collision-aware tests)."""
    return stable_hash64("embed", token) & (EMBED_DIM - 1)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(a @ b) / (na * nb)


# -- stub text generation -----------------------------------------------------


_SENTENCE_END = re.compile(r"[.!?](?=\s|$)")


def first_sentence(text: str) -> str:
    match = _SENTENCE_END.search(text)
    if match:
        return text[: match.end()].strip()
    return text.strip()


def stub_summary(paper: "PaperNode") -> str:
    if paper.abstract:
        return first_sentence(paper.abstract)[:SUMMARY_LIMIT]
    return paper.title[:SUMMARY_LIMIT]


def top_terms(text: str, k: int) -> list[str]:
    """Most frequent content terms; ties broken lexicographically."""
    counts: dict[str, int] = {}
    for token in content_tokens(text):
        counts[token] = counts.get(token, 0) + 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [term for term, _ in ranked[:k]]


# -- engine -------------------------------------------------------------------


class InsightEngine:
    """Caches per paper so repeated panel openings cost nothing."""

    def __init__(self, provider: InsightProvider | None = None):
        self.provider = provider or InsightProvider()
        self._cache: dict[tuple, Answer] = {}
        self.remote_calls = 0

    def summarize(self, paper: "PaperNode") -> Answer:
        key = ("tldr", paper.id, self.provider.kind.value)
        if key in self._cache:
            return self._cache[key]
        if self.provider.kind == ProviderKind.REMOTE_LLM:
            try:
                self.remote_calls += 1
                text = self.provider.complete(_prompt(
                    "tldr_v1.txt",
                    title=paper.title, abstract=paper.abstract or ""))
                answer = Answer(text.strip())
            except ProviderError:
                answer = Answer(stub_summary(paper), fallback=True)
        else:
            answer = Answer(stub_summary(paper))
        self._cache[key] = answer
        return answer

    def extract_keywords(self, paper: "PaperNode", k: int) -> Answer:
        if k < 1:
            raise ValidationError("keyword count must be >= 1")
        key = ("keywords", paper.id, self.provider.kind.value, k)
        if key in self._cache:
            return self._cache[key]
        if self.provider.kind == ProviderKind.REMOTE_LLM:
            try:
                self.remote_calls += 1
                text = self.provider.complete(_prompt(
                    "keywords_v1.txt",
                    title=paper.title, abstract=paper.abstract or ""))
                words = [w.strip() for w in text.split(",") if w.strip()]
                answer = Answer(words[:k])
            except ProviderError:
                answer = Answer(top_terms(paper.text(), k), fallback=True)
        else:
            answer = Answer(top_terms(paper.text(), k))
        self._cache[key] = answer
        return answer

    def cluster(self, doc: "GraphDocument",
                k: int | None = None) -> list["ClusterAssignment"]:
        """Thematic partition of the whole document with labeled anchors."""
        from .graph import ClusterAssignment

        ids = list(doc.nodes)
        n = len(ids)
        if n == 0:
            raise ValidationError("cannot cluster an empty document")
        if k is not None and not (1 <= k <= n):
            raise ValidationError("k must be between 1 and %d" % n)

        X = np.stack([embed(doc.nodes[i].text()) for i in ids])
        seed = stable_hash64("cluster", doc.layout.rng_seed) & 0x7FFFFFFF

        if k is None:
            k = self._choose_k(X, seed)
        labels, _, _ = kmeans(X, k, seed)

        groups: dict[int, list[str]] = {}
        for node_id, label in zip(ids, labels):
            groups.setdefault(int(label), []).append(node_id)
        ordered = sorted(groups.values(), key=lambda m: (-len(m), min(m)))

        if doc.layout.positions:
            pts = np.array([doc.layout.positions[i] for i in ids])
            centroid = pts.mean(axis=0)
        else:
            centroid = np.zeros(3)

        out: list[ClusterAssignment] = []
        for cid, members in enumerate(ordered):
            out.append(ClusterAssignment(
                cluster_id=cid,
                label=self._label(doc, members, cid),
                member_ids=members,
                anchor=tuple(centroid + ANCHOR_RADIUS * _direction(cid)),
            ))
        return out

    def _label(self, doc: "GraphDocument", members: list[str], cid: int) -> str:
        titles = " ".join(doc.nodes[m].title for m in members)
        if self.provider.kind == ProviderKind.REMOTE_LLM:
            try:
                self.remote_calls += 1
                text = self.provider.complete(_prompt(
                    "cluster_label_v1.txt", titles=titles))
                line = text.strip().splitlines()[0].strip()
                if line:
                    return line
            except ProviderError:
                pass
        terms = top_terms(titles, 2)
        return " ".join(terms) if terms else "topic-%d" % cid

    def _choose_k(self, X: np.ndarray, seed: int) -> int:
        n = len(X)
        if n < 3:
            return 1
        best_k, best_score = 2, -2.0
        for k in range(2, min(AUTO_K_CAP, n - 1) + 1):
            labels, _, _ = kmeans(X, k, seed)
            score = silhouette(X, labels)
            if score > best_score:
                best_k, best_score = k, score
        return best_k


def _direction(index: int) -> np.ndarray:
    """Evenly spread unit directions from the golden-angle sequence."""
    roll = index * GOLDEN_ANGLE
    yaw = index * DECLINATION_ANGLE
    return np.array([
        math.sin(roll) * math.cos(yaw),
        math.cos(roll),
        math.sin(roll) * math.sin(yaw),
    ])


def anchor_for(centroid: Vec3, index: int) -> Vec3:
    base = np.asarray(centroid) + ANCHOR_RADIUS * _direction(index)
    return (float(base[0]), float(base[1]), float(base[2]))


# -- k-means ------------------------------------------------------------------


def kmeans(X: np.ndarray, k: int, seed: int,
           restarts: int = KMEANS_RESTARTS,
           max_iter: int = KMEANS_MAX_ITER) -> tuple[np.ndarray, np.ndarray, float]:
    """Best of ``restarts`` seeded k-means++ runs by within-cluster SSE.

    Returns (labels, centers, sse). Fully deterministic for a given seed.
    """
    n = len(X)
    if not (1 <= k <= n):
        raise ValidationError("k must be between 1 and %d" % n)
    best: tuple[np.ndarray, np.ndarray, float] | None = None
    for restart in range(restarts):
        rng = np.random.default_rng([seed, k, restart])
        centers = _kmeans_pp(X, k, rng)
        labels = np.zeros(n, dtype=np.int64)
        for _ in range(max_iter):
            d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            new_labels = d2.argmin(axis=1)
            for cid in range(k):
                mask = new_labels == cid
                if not mask.any():
                    # revive an empty cluster with the worst-fit point
                    worst = int(d2[np.arange(n), new_labels].argmax())
                    new_labels[worst] = cid
                    mask = new_labels == cid
                centers[cid] = X[mask].mean(axis=0)
            if (new_labels == labels).all():
                labels = new_labels
                break
            labels = new_labels
        sse = float(((X - centers[labels]) ** 2).sum())
        if best is None or sse < best[2]:
            best = (labels.copy(), centers.copy(), sse)
    assert best is not None
    return best


def _kmeans_pp(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(X)
    centers = [X[int(rng.integers(n))]]
    while len(centers) < k:
        d2 = np.min(
            [((X - c) ** 2).sum(axis=1) for c in centers], axis=0)
        total = float(d2.sum())
        if total == 0.0:
            centers.append(X[int(rng.integers(n))])
            continue
        r = rng.random() * total
        idx = int(np.searchsorted(np.cumsum(d2), r))
        centers.append(X[min(idx, n - 1)])
    return np.array(centers, dtype=np.float64)


def silhouette(X: np.ndarray, labels: np.ndarray) -> float:
    """Mean silhouette coefficient with euclidean distance."""
    n = len(X)
    dist = np.sqrt(((X[:, None, :] - X[None, :, :]) ** 2).sum(axis=2))
    score = 0.0
    cluster_ids = np.unique(labels)
    for i in range(n):
        own = labels[i]
        own_mask = labels == own
        own_size = int(own_mask.sum())
        if own_size <= 1:
            continue
        a = dist[i, own_mask].sum() / (own_size - 1)
        b = math.inf
        for cid in cluster_ids:
            if cid == own:
                continue
            other = labels == cid
            b = min(b, float(dist[i, other].mean()))
        denom = max(a, b)
        if denom > 0:
            score += (b - a) / denom
    return score / n
