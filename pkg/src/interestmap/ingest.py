"""Read raw activity data, apply the activity threshold, build the bipartite graph.

Input rows are (actor, forum, post_count) triples, either tab-separated or
JSON-lines. Actor ids are opaque, pre-anonymized strings; we never hash or
otherwise transform them.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import requests
import scipy.sparse as sp

from .errors import FetchError, IntegrityError, ParameterError, ParseError


@dataclass(frozen=True, slots=True)
class ActivityRecord:
    """One (actor, forum, post count) observation."""

    actor_id: str
    forum_id: str
    post_count: int


@dataclass(frozen=True)
class IngestConfig:
    """Activity threshold settings.

    min_posts: an actor counts as interested in a forum only with at least
    this many posts there (default 10). min_forum_actors: forums with fewer
    qualifying actors are dropped (default 1, i.e. single-actor forums stay).
    """

    min_posts: int = 10
    min_forum_actors: int = 1

    def __post_init__(self):
        if self.min_posts < 1:
            raise ParameterError("min_posts must be >= 1")
        if self.min_forum_actors < 0:
            raise ParameterError("min_forum_actors must be >= 0")


class BipartiteGraph:
    """Actors x forums boolean incidence after thresholding.

    Both id tuples are sorted; `incidence` is a CSR matrix of shape
    (n_actors, n_forums) with one entry per qualifying membership.
    """

    __slots__ = ("actors", "forums", "incidence")

    def __init__(self, actors, forums, incidence: sp.csr_matrix):
        self.actors = tuple(actors)
        self.forums = tuple(forums)
        self.incidence = incidence

    @property
    def n_actors(self) -> int:
        return len(self.actors)

    @property
    def n_forums(self) -> int:
        return len(self.forums)

    @property
    def n_memberships(self) -> int:
        return int(self.incidence.nnz)

    def mean_forums_per_actor(self) -> float:
        if self.n_actors == 0:
            return 0.0
        return self.n_memberships / self.n_actors

    def actors_per_forum(self) -> np.ndarray:
        return np.asarray(self.incidence.sum(axis=0)).ravel().astype(np.int64)

    def forums_of(self, actor: str) -> tuple[str, ...]:
        try:
            i = self.actors.index(actor)
        except ValueError:
            raise ParameterError(f"unknown actor {actor!r}") from None
        row = self.incidence.getrow(i)
        return tuple(self.forums[j] for j in row.indices.tolist())

    def memberships(self):
        """Iterate (actor, forum) pairs in actor-major order."""
        coo = self.incidence.tocoo()
        order = np.lexsort((coo.col, coo.row))
        for r, c in zip(coo.row[order].tolist(), coo.col[order].tolist()):
            yield self.actors[r], self.forums[c]

    def __repr__(self):
        return (
            f"BipartiteGraph(actors={self.n_actors}, forums={self.n_forums}, "
            f"memberships={self.n_memberships})"
        )


def _parse_tsv_line(line: str, path: str, lineno: int) -> ActivityRecord:
    parts = line.split("\t")
    if len(parts) != 3:
        raise ParseError("expected 3 tab-separated fields", path=path, line=lineno)
    actor, forum, count_text = (p.strip() for p in parts)
    if not actor or not forum:
        raise ParseError("empty actor or forum id", path=path, line=lineno)
    try:
        count = int(count_text)
    except ValueError:
        raise ParseError(f"post count {count_text!r} is not an integer", path=path, line=lineno) from None
    if count < 0:
        raise ParseError(f"post count {count} is negative", path=path, line=lineno)
    return ActivityRecord(actor, forum, count)


def _parse_jsonl_line(line: str, path: str, lineno: int) -> ActivityRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON ({exc.msg})", path=path, line=lineno) from None
    if not isinstance(obj, dict):
        raise ParseError("row is not a JSON object", path=path, line=lineno)
    try:
        actor, forum, count = obj["actor"], obj["forum"], obj["count"]
    except KeyError as exc:
        raise ParseError(f"missing key {exc.args[0]!r}", path=path, line=lineno) from None
    if not isinstance(actor, str) or not actor or not isinstance(forum, str) or not forum:
        raise ParseError("actor and forum must be non-empty strings", path=path, line=lineno)
    if isinstance(count, bool) or not isinstance(count, int):
        raise ParseError("count must be an integer", path=path, line=lineno)
    if count < 0:
        raise ParseError(f"post count {count} is negative", path=path, line=lineno)
    return ActivityRecord(actor, forum, count)


def load_activity(path, format: str = "tsv") -> list[ActivityRecord]:
    """Parse an activity file into records, one per input row.

    `format` is "tsv" (`actor \\t forum \\t count`, no header) or "jsonlines"
    (`{"actor": ..., "forum": ..., "count": ...}` per line). Malformed rows
    raise ParseError naming the line; unreadable files raise OSError.
    """
    if format not in ("tsv", "jsonlines"):
        raise ParameterError(f"unknown format {format!r} (expected 'tsv' or 'jsonlines')")
    parse = _parse_tsv_line if format == "tsv" else _parse_jsonl_line
    path = Path(path)
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            records.append(parse(line.rstrip("\r\n"), str(path), lineno))
    return records


def build_bipartite(records, cfg: IngestConfig | None = None) -> BipartiteGraph:
    """Threshold records into a boolean actor/forum incidence.

    A membership exists iff the summed post count for (actor, forum) is at
    least cfg.min_posts. Duplicate (actor, forum) rows are aggregated by
    summing before the threshold is applied. Forums with fewer than
    cfg.min_forum_actors qualifying actors are dropped, then actors left
    without any membership are dropped. Output is independent of row order.
    """
    cfg = cfg or IngestConfig()
    records = list(records)
    if not records:
        return BipartiteGraph((), (), sp.csr_matrix((0, 0), dtype=np.int8))

    actor_code: dict[str, int] = {}
    forum_code: dict[str, int] = {}
    a_idx = np.empty(len(records), dtype=np.int64)
    f_idx = np.empty(len(records), dtype=np.int64)
    counts = np.empty(len(records), dtype=np.int64)
    for pos, rec in enumerate(records):
        a_idx[pos] = actor_code.setdefault(rec.actor_id, len(actor_code))
        f_idx[pos] = forum_code.setdefault(rec.forum_id, len(forum_code))
        counts[pos] = rec.post_count

    n_forums_raw = len(forum_code)
    key = a_idx * n_forums_raw + f_idx
    uniq, inverse = np.unique(key, return_inverse=True)
    sums = np.zeros(uniq.size, dtype=np.int64)
    np.add.at(sums, inverse, counts)

    qual = sums >= cfg.min_posts
    qa = (uniq[qual] // n_forums_raw).astype(np.int64)
    qf = (uniq[qual] % n_forums_raw).astype(np.int64)

    per_forum = np.bincount(qf, minlength=n_forums_raw)
    forum_ok = per_forum >= cfg.min_forum_actors
    keep = forum_ok[qf]
    qa, qf = qa[keep], qf[keep]

    actor_names = {code: name for name, code in actor_code.items()}
    forum_names = {code: name for name, code in forum_code.items()}
    actors = sorted({actor_names[int(c)] for c in qa})
    forums = sorted({forum_names[int(c)] for c in qf})
    a_final = {name: i for i, name in enumerate(actors)}
    f_final = {name: i for i, name in enumerate(forums)}

    rows = np.fromiter((a_final[actor_names[int(c)]] for c in qa), dtype=np.int64, count=qa.size)
    cols = np.fromiter((f_final[forum_names[int(c)]] for c in qf), dtype=np.int64, count=qf.size)
    incidence = sp.csr_matrix(
        (np.ones(rows.size, dtype=np.int8), (rows, cols)),
        shape=(len(actors), len(forums)),
    )
    return BipartiteGraph(actors, forums, incidence)


def _sha256_of(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def manifest_path(dest) -> Path:
    dest = Path(dest)
    return dest.with_name(dest.name + ".manifest.json")


def fetch_dataset(url: str, dest, *, max_attempts: int = 4, timeout: float = 30.0) -> Path:
    """Download `url` to `dest`, recording `{url, sha256, bytes, fetched_at}`
    in a sidecar manifest.

    Interrupted transfers are resumed with Range requests when the server
    allows it, so a resumed download hashes identically to an uninterrupted
    one. HTTP 4xx fails immediately; connection errors and 5xx are retried
    up to max_attempts. If a manifest from an earlier fetch of the same URL
    exists and the new checksum differs, IntegrityError is raised and dest
    is left untouched.
    """
    dest = Path(dest)
    dest.parent.mkdir(parents=True, exist_ok=True)
    part = dest.with_name(dest.name + ".part")
    if part.exists():
        part.unlink()

    last_error: Exception | None = None
    done = False
    for _ in range(max_attempts):
        offset = part.stat().st_size if part.exists() else 0
        headers = {"Range": f"bytes={offset}-"} if offset else {}
        try:
            resp = requests.get(url, stream=True, timeout=timeout, headers=headers)
        except requests.RequestException as exc:
            last_error = FetchError(f"connection to {url} failed: {exc}")
            continue
        with resp:
            if resp.status_code in (200, 206):
                mode = "ab" if (offset and resp.status_code == 206) else "wb"
                try:
                    with open(part, mode) as fh:
                        for chunk in resp.iter_content(chunk_size=1 << 16):
                            fh.write(chunk)
                    done = True
                    break
                except requests.RequestException as exc:
                    last_error = FetchError(f"transfer from {url} interrupted: {exc}")
                    continue
            if resp.status_code == 416 and offset:
                # Range past the end: the previous partial file was complete.
                done = True
                break
            if 400 <= resp.status_code < 500:
                raise FetchError(
                    f"GET {url} failed with status {resp.status_code}",
                    status=resp.status_code,
                )
            last_error = FetchError(
                f"GET {url} failed with status {resp.status_code}",
                status=resp.status_code,
            )
    if not done:
        raise last_error or FetchError(f"GET {url} failed")

    sha = _sha256_of(part)
    mpath = manifest_path(dest)
    if mpath.exists():
        try:
            previous = json.loads(mpath.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError):
            previous = None
        if previous and previous.get("url") == url and previous.get("sha256") != sha:
            part.unlink()
            raise IntegrityError(
                f"checksum mismatch for {url}: manifest has {previous.get('sha256')}, got {sha}"
            )

    size = part.stat().st_size
    os.replace(part, dest)
    manifest = {
        "url": url,
        "sha256": sha,
        "bytes": size,
        "fetched_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    mpath.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return dest
