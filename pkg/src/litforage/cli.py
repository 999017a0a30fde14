"""Command-line driver for desk-scale foraging sessions.

Seeds a session directory, runs expansions / clustering / annotation /
linking / removal offline against fixtures or the live provider, renders
bird's-eye and usage plots, verifies record/replay identity, and serves
the HTTP + stream API.

Every mutating invocation appends one interaction event with modality
``api``. Exit codes: 0 success, 2 validation, 3 not-found, 4
provider/transport, 5 replay mismatch.
"""

from __future__ import annotations

import json
import socket
import sys
import time
from pathlib import Path

import click

from .canonical import canonical_dumps
from .driver import SessionDriver
from .errors import (
    ForageError,
    NotFoundError,
    ReplayMismatchError,
    StartupError,
    exit_code_for,
)
from .graph import document_diff, structurally_equal
from .insights import InsightEngine
from .metadata import ProviderConfig, ProviderMode, ScholarClient
from .plots import render_birdseye, render_usage
from .session import Modality, SessionStore, read_events, replay


def now_ms() -> int:
    return int(time.time() * 1000)


def _provider_config(session: SessionStore,
                     fixtures: str | None) -> ProviderConfig:
    """An explicit fixture dir wins; otherwise whatever the session was
    seeded with; else live.

    Either way, responses are written through to the session's fixtures
    directory so the session replays hermetically later.
    """
    record = session.fixtures_dir
    if not fixtures:
        remembered = _load_provider_choice(session)
        fixtures = remembered.get("fixture_path")
    if fixtures:
        return ProviderConfig(mode=ProviderMode.FIXTURE,
                              fixture_path=fixtures, record_path=record)
    return ProviderConfig(record_path=record)


def _provider_choice_path(session: SessionStore) -> Path:
    return session.root / "provider.json"


def _load_provider_choice(session: SessionStore) -> dict:
    path = _provider_choice_path(session)
    if path.exists():
        return json.loads(path.read_text())
    return {}


def _remember_provider_choice(session: SessionStore,
                              fixtures: str | None) -> None:
    choice = {"mode": "fixture" if fixtures else "live"}
    if fixtures:
        choice["fixture_path"] = str(Path(fixtures).resolve())
    _provider_choice_path(session).write_text(json.dumps(choice))


def _open_driver(session_dir: str, fixtures: str | None) -> SessionDriver:
    store = SessionStore(session_dir)
    if not store.document_path.exists():
        raise NotFoundError("no session at %s (run 'forage seed' first)"
                            % session_dir)
    client = ScholarClient(_provider_config(store, fixtures))
    return SessionDriver.open(store, client, InsightEngine())


def _run(fn) -> None:
    try:
        fn()
    except ForageError as err:
        click.echo("error [%s]: %s" % (err.code, err.message), err=True)
        sys.exit(exit_code_for(err))


def _echo_result(result: dict) -> None:
    click.echo(canonical_dumps(result))


@click.group()
def main() -> None:
    """Literature-foraging sessions from the command line."""


@main.command()
@click.argument("ids", nargs=-1, required=True)
@click.option("--topic", default=None, help="Review topic for the session.")
@click.option("--session", "session_dir", required=True,
              type=click.Path(), help="Session directory to create.")
@click.option("--fixtures", default=None, type=click.Path(exists=True),
              help="Provider fixture directory (hermetic mode).")
@click.option("--rng-seed", default=None, type=int,
              help="Layout seed (derived from the session id by default).")
def seed(ids, topic, session_dir, fixtures, rng_seed):
    """Create a session seeded with the given paper IDS."""

    def go() -> None:
        unique = list(dict.fromkeys(ids))
        if len(unique) < len(ids):
            click.echo("warning: duplicate seed ids removed", err=True)
        store = SessionStore(session_dir)
        _remember_provider_choice(store, fixtures)
        client = ScholarClient(_provider_config(store, fixtures))
        driver = SessionDriver.create(
            unique, topic, client, now_ms(), store=store,
            rng_seed=rng_seed, insight_engine=InsightEngine())
        driver.close()
        click.echo("seeded session %s with %d papers"
                   % (driver.session_id, len(driver.doc.nodes)))

    _run(go)


def _command(session_dir: str, fixtures: str | None, command: dict) -> None:
    driver = _open_driver(session_dir, fixtures)
    try:
        result = driver.execute(command, Modality.API, now_ms())
        _echo_result(result)
    finally:
        driver.log.close() if driver.log else None


@main.command()
@click.option("--session", "session_dir", required=True, type=click.Path())
@click.option("--fixtures", default=None, type=click.Path(exists=True))
@click.option("--mode", required=True,
              type=click.Choice(["thematic", "citations", "references",
                                 "author"]))
@click.option("--seed", "seeds", multiple=True,
              help="Seed paper id (repeatable; thematic mode).")
@click.option("--id", "paper_id", default=None,
              help="Anchor paper id (citations/references/author modes).")
@click.option("--author-id", default=None, help="Author id (author mode).")
@click.option("-k", default=5, type=int, help="Result budget.")
def expand(session_dir, fixtures, mode, seeds, paper_id, author_id, k):
    """Grow the network by recommendations, citation links, or author."""

    def go() -> None:
        command: dict = {"type": "expand", "mode": mode, "k": k}
        if mode == "thematic":
            command["seeds"] = list(seeds)
        else:
            command["id"] = paper_id
        if mode == "author":
            command["author_id"] = author_id
        _command(session_dir, fixtures, command)

    _run(go)


@main.command()
@click.option("--session", "session_dir", required=True, type=click.Path())
@click.option("--k", default=None, type=int,
              help="Cluster count (silhouette-chosen when omitted).")
def cluster(session_dir, k):
    """Group papers into labeled thematic clusters."""

    def go() -> None:
        command: dict = {"type": "cluster"}
        if k is not None:
            command["k"] = k
        _command(session_dir, None, command)

    _run(go)


@main.command()
@click.argument("paper_id")
@click.argument("text")
@click.option("--session", "session_dir", required=True, type=click.Path())
def annotate(paper_id, text, session_dir):
    """Attach a note to a paper."""
    _run(lambda: _command(session_dir, None,
                          {"type": "annotate", "id": paper_id, "text": text}))


@main.command()
@click.argument("a")
@click.argument("b")
@click.option("--session", "session_dir", required=True, type=click.Path())
def link(a, b, session_dir):
    """Create a custom link between two papers."""
    _run(lambda: _command(session_dir, None, {"type": "link", "a": a, "b": b}))


@main.command()
@click.argument("paper_id")
@click.option("--session", "session_dir", required=True, type=click.Path())
def remove(paper_id, session_dir):
    """Remove a paper and everything attached to it."""
    _run(lambda: _command(session_dir, None,
                          {"type": "remove", "id": paper_id}))


@main.command(name="plot-birdseye")
@click.option("--session", "session_dir", required=True, type=click.Path())
@click.option("--snapshot", "snapshot_ts", default=None, type=int,
              help="Snapshot timestamp (default: latest state).")
@click.option("--out", "out_path", required=True, type=click.Path())
def plot_birdseye(session_dir, snapshot_ts, out_path):
    """Render the bird's-eye layout projection as SVG."""

    def go() -> None:
        store = SessionStore(session_dir)
        if snapshot_ts is not None:
            times = store.snapshot_times()
            if snapshot_ts not in times:
                raise NotFoundError("no snapshot %d (have: %s)"
                                    % (snapshot_ts, times))
            doc = store.load_snapshot(snapshot_ts)
        else:
            times = store.snapshot_times()
            doc = (store.load_snapshot(times[-1]) if times
                   else store.load_document())
        Path(out_path).write_bytes(render_birdseye(doc))
        click.echo("wrote %s" % out_path)

    _run(go)


@main.command(name="plot-usage")
@click.option("--session", "session_dir", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
def plot_usage(session_dir, out_path):
    """Render the interaction-log timeline as SVG."""

    def go() -> None:
        store = SessionStore(session_dir)
        events = read_events(store.events_path)
        Path(out_path).write_bytes(render_usage(events))
        click.echo("wrote %s" % out_path)

    _run(go)


@main.command(name="replay")
@click.option("--session", "session_dir", required=True, type=click.Path())
def replay_cmd(session_dir):
    """Re-execute the event log and verify it reproduces the document."""

    def go() -> None:
        from litforage.errors import ProviderError, ReplayIncompleteError

        store = SessionStore(session_dir)
        events = read_events(store.events_path)
        if not events or events[0].action != "session_created":
            raise NotFoundError(
                "event log lacks a session_created event; nothing to replay")
        try:
            initial = SessionDriver.reconstruct_initial(events[0],
                                                        store.fixtures_dir)
        except ProviderError as exc:
            raise ReplayIncompleteError(
                "cannot rebuild the seeded document: %s" % exc.message,
                exc.detail) from exc
        replayed = replay(initial, events[1:], store.fixtures_dir)
        recorded = store.load_document()
        if structurally_equal(recorded, replayed):
            click.echo("EQUAL")
            return
        diff = document_diff(recorded, replayed)
        click.echo(json.dumps(diff, indent=2))
        raise ReplayMismatchError("replayed document differs", diff)

    _run(go)


@main.command()
@click.option("--session", "session_dir", required=True, type=click.Path())
@click.option("--fixtures", default=None, type=click.Path(exists=True))
@click.option("--bind", default="127.0.0.1:8077", help="host:port to bind.")
def serve(session_dir, fixtures, bind):
    """Serve the session over HTTP + stream until interrupted."""

    def go() -> None:
        import uvicorn

        from .service import create_app

        host, _, port_text = bind.partition(":")
        port = int(port_text or "8077")
        probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        try:
            probe.bind((host, port))
        except OSError as exc:
            raise StartupError("cannot bind %s: %s" % (bind, exc)) from exc
        finally:
            probe.close()

        store = SessionStore(session_dir)
        config = _provider_config(store, fixtures)
        app = create_app(Path(session_dir).parent, config)
        driver = _open_driver(session_dir, fixtures)
        app.state.mount(driver)
        click.echo("serving session %s at http://%s:%d (session id %s)"
                   % (session_dir, host, port, driver.session_id))
        uvicorn.run(app, host=host, port=port, log_level="warning",
                    timeout_graceful_shutdown=5)

    _run(go)


if __name__ == "__main__":
    main()
