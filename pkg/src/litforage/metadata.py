"""Scholarly-metadata provider client.

Two modes share one interface: Live talks to the provider's HTTPS JSON
endpoints with token-bucket rate limiting, retry with exponential
backoff, and an in-memory cache; Fixture serves recorded responses from
a directory of canonical-JSON files named by a stable hash of
(endpoint, params) and never touches the network.

A Live client can write through to a record directory, which produces
exactly the fixture layout — record a session once, replay it forever.
"""

from __future__ import annotations

import json
import os
import random
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable

import httpx

from .canonical import canonical_bytes, request_hash
from .errors import (
    FixtureMissError,
    ProviderNotFound,
    RateLimitError,
    TransportError,
    ValidationError,
)
from .graph import Author, PaperNode

API_KEY_ENV = "LITFORAGE_SCHOLAR_API_KEY"

DEFAULT_GRAPH_URL = "https://api.semanticscholar.org/graph/v1"
DEFAULT_RECS_URL = "https://api.semanticscholar.org/recommendations/v1"

PAPER_FIELDS = (
    "title,abstract,year,venue,citationCount,externalIds,authors"
)


class ProviderMode(str, Enum):
    LIVE = "live"
    FIXTURE = "fixture"


@dataclass
class ProviderConfig:
    base_url: str = DEFAULT_GRAPH_URL
    recommendations_url: str = DEFAULT_RECS_URL
    api_key: str | None = None
    requests_per_second: float = 1.0
    max_retries: int = 3
    mode: ProviderMode = ProviderMode.LIVE
    fixture_path: str | Path | None = None
    record_path: str | Path | None = None

    def __post_init__(self) -> None:
        if self.requests_per_second <= 0:
            raise ValidationError("requests_per_second must be > 0")
        if self.mode == ProviderMode.FIXTURE and self.fixture_path is None:
            raise ValidationError("fixture mode requires fixture_path")
        if self.api_key is None:
            self.api_key = os.environ.get(API_KEY_ENV)

    @classmethod
    def fixtures(cls, path: str | Path) -> "ProviderConfig":
        return cls(mode=ProviderMode.FIXTURE, fixture_path=path)


@dataclass
class PaperRecord:
    """Provider view of one paper, plus its citation id lists."""

    id: str
    title: str = ""
    authors: list[Author] = field(default_factory=list)
    abstract: str | None = None
    year: int | None = None
    venue: str | None = None
    citation_count: int | None = None
    external_ids: dict[str, str] = field(default_factory=dict)
    citations: list[str] = field(default_factory=list)
    references: list[str] = field(default_factory=list)

    def to_node(self, is_seed: bool = False) -> PaperNode:
        return PaperNode(
            id=self.id,
            title=self.title,
            authors=list(self.authors),
            abstract=self.abstract,
            year=self.year,
            venue=self.venue,
            citation_count=self.citation_count,
            external_ids=dict(self.external_ids),
            is_seed=is_seed,
        )

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "authors": [a.to_dict() for a in self.authors],
            "abstract": self.abstract,
            "year": self.year,
            "venue": self.venue,
            "citation_count": self.citation_count,
            "external_ids": dict(self.external_ids),
            "citations": list(self.citations),
            "references": list(self.references),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PaperRecord":
        return cls(
            id=d["id"],
            title=d.get("title") or "",
            authors=[Author.from_dict(a) for a in d.get("authors", [])],
            abstract=d.get("abstract"),
            year=d.get("year"),
            venue=d.get("venue"),
            citation_count=d.get("citation_count"),
            external_ids=dict(d.get("external_ids") or {}),
            citations=list(d.get("citations") or []),
            references=list(d.get("references") or []),
        )

    def project(self, fields: set[str] | None) -> "PaperRecord":
        """Keep only the requested optional fields; id/title always present."""
        if fields is None:
            return self
        keep = set(fields)
        return PaperRecord(
            id=self.id,
            title=self.title,
            authors=self.authors if "authors" in keep else [],
            abstract=self.abstract if "abstract" in keep else None,
            year=self.year if "year" in keep else None,
            venue=self.venue if "venue" in keep else None,
            citation_count=(
                self.citation_count if "citation_count" in keep else None),
            external_ids=(
                dict(self.external_ids) if "external_ids" in keep else {}),
            citations=list(self.citations) if "citations" in keep else [],
            references=list(self.references) if "references" in keep else [],
        )


class TokenBucket:
    """Serializes dispatch at the configured rate; burst of one."""

    def __init__(self, rate: float,
                 clock: Callable[[], float] = time.monotonic,
                 sleeper: Callable[[float], None] = time.sleep):
        self.interval = 1.0 / rate
        self.clock = clock
        self.sleeper = sleeper
        self._next_free = clock()

    def acquire(self) -> None:
        now = self.clock()
        if now < self._next_free:
            self.sleeper(self._next_free - now)
            now = self._next_free
        self._next_free = now + self.interval


def fixture_file(root: str | Path, endpoint: str, params: dict) -> Path:
    return Path(root) / (request_hash(endpoint, params) + ".json")


def write_fixture(root: str | Path, endpoint: str, params: dict,
                  payload: dict) -> Path:
    """Record one provider response in the fixture layout.

    Shared by the write-through recorder and by test-corpus builders so
    file naming can never drift between writers and readers.
    """
    path = fixture_file(root, endpoint, params)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"endpoint": endpoint, "params": params, "payload": payload}
    path.write_bytes(canonical_bytes(doc) + b"\n")
    return path


class ScholarClient:
    """Paper metadata, citation links, author papers and recommendations."""

    def __init__(self, config: ProviderConfig,
                 transport: httpx.BaseTransport | None = None,
                 clock: Callable[[], float] = time.monotonic,
                 sleeper: Callable[[float], None] = time.sleep,
                 backoff_rng: random.Random | None = None):
        self.config = config
        self._cache: dict[str, object] = {}
        self._requests_issued = 0
        self._clock = clock
        self._sleeper = sleeper
        self._rng = backoff_rng or random.Random(0)
        if config.mode == ProviderMode.LIVE:
            self._bucket = TokenBucket(config.requests_per_second, clock, sleeper)
            headers = {}
            if config.api_key:
                headers["x-api-key"] = config.api_key
            self._http = httpx.Client(headers=headers, transport=transport,
                                      timeout=30.0)
        else:
            self._bucket = None
            self._http = None

    # -- public operations ---------------------------------------------------

    def get_paper(self, paper_id: str,
                  fields: set[str] | None = None) -> PaperRecord:
        if not paper_id:
            raise ValidationError("paper id must be non-empty")
        record = self._paper_full(paper_id)
        return record.project(fields)

    def get_citations(self, paper_id: str, limit: int) -> list[PaperRecord]:
        return self._linked(paper_id, "citations", limit)

    def get_references(self, paper_id: str, limit: int) -> list[PaperRecord]:
        return self._linked(paper_id, "references", limit)

    def get_author_papers(self, author_id: str, limit: int) -> list[PaperRecord]:
        if limit < 0:
            raise ValidationError("limit must be >= 0")
        if limit == 0:
            return []
        payload = self._request("author_papers", {"author_id": author_id})
        records = [PaperRecord.from_dict(d) for d in payload["items"]]
        return records[:limit]

    def get_recommendations(self, seed_ids: list[str],
                            limit: int) -> list[PaperRecord]:
        if not seed_ids:
            raise ValidationError("seed list must be non-empty")
        if limit < 0:
            raise ValidationError("limit must be >= 0")
        if limit == 0:
            return []
        seeds = sorted(set(seed_ids))
        payload = self._request("recommendations", {"seeds": seeds})
        records = [PaperRecord.from_dict(d) for d in payload["items"]]
        excluded = set(seed_ids)
        records = [r for r in records if r.id not in excluded]
        return records[:limit]

    @property
    def requests_issued(self) -> int:
        """Requests answered by the backing store (cache hits excluded)."""
        return self._requests_issued

    # -- internals -------------------------------------------------------------

    def _paper_full(self, paper_id: str) -> PaperRecord:
        payload = self._request("paper", {"id": paper_id})
        return PaperRecord.from_dict(payload)

    def _linked(self, paper_id: str, endpoint: str,
                limit: int) -> list[PaperRecord]:
        if limit < 0:
            raise ValidationError("limit must be >= 0")
        if limit == 0:
            return []
        payload = self._request(endpoint, {"id": paper_id})
        records = [PaperRecord.from_dict(d) for d in payload["items"]]
        return records[:limit]

    def _request(self, endpoint: str, params: dict) -> dict:
        key = request_hash(endpoint, params)
        if key in self._cache:
            return self._cache[key]  # type: ignore[return-value]
        if self.config.mode == ProviderMode.FIXTURE:
            payload = self._from_fixture(endpoint, params)
        else:
            payload = self._from_live(endpoint, params)
        if self.config.record_path is not None:
            target = fixture_file(self.config.record_path, endpoint, params)
            if not target.exists():
                write_fixture(self.config.record_path, endpoint, params, payload)
        self._requests_issued += 1
        self._cache[key] = payload
        return payload

    def _from_fixture(self, endpoint: str, params: dict) -> dict:
        path = fixture_file(self.config.fixture_path, endpoint, params)
        if not path.exists():
            if endpoint == "paper":
                raise ProviderNotFound(
                    "unknown paper %r" % params.get("id"), dict(params))
            raise FixtureMissError(
                "no fixture for %s %s" % (endpoint, params),
                {"endpoint": endpoint, "params": params})
        doc = json.loads(path.read_bytes())
        return doc["payload"]

    # -- live transport ---------------------------------------------------------

    def _from_live(self, endpoint: str, params: dict) -> dict:
        url, query, method, body = self._route(endpoint, params)
        response = self._send(url, query, method, body)
        return self._normalize(endpoint, response)

    def _route(self, endpoint: str, params: dict):
        base = self.config.base_url.rstrip("/")
        if endpoint == "paper":
            return ("%s/paper/%s" % (base, params["id"]),
                    {"fields": PAPER_FIELDS + ",citations.paperId,references.paperId"},
                    "GET", None)
        if endpoint in ("citations", "references"):
            return ("%s/paper/%s/%s" % (base, params["id"], endpoint),
                    {"fields": PAPER_FIELDS, "limit": 100}, "GET", None)
        if endpoint == "author_papers":
            return ("%s/author/%s/papers" % (base, params["author_id"]),
                    {"fields": PAPER_FIELDS, "limit": 100}, "GET", None)
        if endpoint == "recommendations":
            recs = self.config.recommendations_url.rstrip("/")
            return ("%s/papers" % recs, {"fields": PAPER_FIELDS, "limit": 100},
                    "POST", {"positivePaperIds": params["seeds"]})
        raise ValidationError("unknown endpoint %r" % endpoint)

    def _send(self, url: str, query: dict, method: str, body: dict | None) -> dict:
        delay = 1.0
        attempts = self.config.max_retries + 1
        for attempt in range(attempts):
            self._bucket.acquire()
            try:
                if method == "GET":
                    resp = self._http.get(url, params=query)
                else:
                    resp = self._http.post(url, params=query, json=body)
            except httpx.HTTPError as exc:
                raise TransportError("provider request failed: %s" % exc) from exc
            if resp.status_code == 404:
                raise ProviderNotFound("provider has no record at %s" % url)
            if resp.status_code == 429:
                if attempt + 1 < attempts:
                    self._sleeper(delay * (1.0 + self._rng.random()))
                    delay *= 2.0
                    continue
                raise RateLimitError("provider throttled after %d attempts"
                                     % attempts)
            if resp.status_code >= 400:
                raise TransportError(
                    "provider error %d at %s" % (resp.status_code, url))
            return resp.json()
        raise RateLimitError("unreachable")  # pragma: no cover

    @staticmethod
    def _record_from_provider(d: dict) -> dict:
        ext = d.get("externalIds") or {}
        return PaperRecord(
            id=d.get("paperId") or "",
            title=d.get("title") or "",
            authors=[Author(a.get("name", ""), a.get("authorId"))
                     for a in d.get("authors") or []],
            abstract=d.get("abstract"),
            year=d.get("year"),
            venue=d.get("venue"),
            citation_count=d.get("citationCount"),
            external_ids={k: str(v) for k, v in ext.items()},
            citations=[c["paperId"] for c in d.get("citations") or []
                       if c.get("paperId")],
            references=[r["paperId"] for r in d.get("references") or []
                        if r.get("paperId")],
        ).to_dict()

    def _normalize(self, endpoint: str, raw: dict) -> dict:
        """Map provider wire shapes onto the fixture payload schema."""
        if endpoint == "paper":
            return self._record_from_provider(raw)
        items = raw.get("data") or raw.get("recommendedPapers") or []
        if endpoint == "citations":
            items = [d.get("citingPaper", d) for d in items]
        elif endpoint == "references":
            items = [d.get("citedPaper", d) for d in items]
        return {"items": [self._record_from_provider(d) for d in items
                          if d.get("paperId")]}
