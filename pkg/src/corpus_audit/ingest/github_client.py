"""Thin GitHub REST client that collects contributor profile names.

Reads a repository list, fetches each repository's contributors and their
profile ``name`` fields, and appends one NDJSON line per contributor to an
output file. A repository is written in one go once all of its contributors
are fetched, so an interrupted run resumes by skipping repositories already
present in the output.
"""
from __future__ import annotations

import json
import logging
import os
import time
from collections.abc import Iterable, Iterator
from pathlib import Path
from typing import Any

import requests

from corpus_audit.ingest._jsonio import MALFORMED, iter_json_entries

log = logging.getLogger(__name__)

API_ROOT = "https://api.github.com"
TOKEN_ENV = "GITHUB_TOKEN"
RETRY_STATUS = frozenset({429, 500, 502, 503, 504})


class GitHubError(RuntimeError):
    pass


def read_repo_list(path: str | Path) -> list[str]:
    """``owner/name`` per line; full github URLs and ``#`` comments are accepted."""
    repos = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "github.com/" in line:
            line = line.split("github.com/", 1)[1]
        parts = line.strip("/").split("/")
        if len(parts) >= 2:
            repos.append(f"{parts[0]}/{parts[1].removesuffix('.git')}")
    return repos


def completed_repos(path: str | Path) -> set[str]:
    path = Path(path)
    if not path.exists():
        return set()
    return {e["repo"] for e in iter_json_entries(path) if e is not MALFORMED and isinstance(e, dict) and "repo" in e}


class GitHubClient:
    def __init__(
        self,
        token: str | None = None,
        session: requests.Session | None = None,
        *,
        min_interval: float = 0.0,
        max_retries: int = 5,
        backoff: float = 2.0,
        sleep=time.sleep,
        clock=time.time,
    ) -> None:
        self.session = session or requests.Session()
        token = token if token is not None else os.environ.get(TOKEN_ENV)
        self.session.headers.update({"Accept": "application/vnd.github+json"})
        if token:
            self.session.headers["Authorization"] = f"Bearer {token}"
        self.min_interval = min_interval
        self.max_retries = max_retries
        self.backoff = backoff
        self._sleep = sleep
        self._clock = clock
        self._last = 0.0
        self._names: dict[str, str | None] = {}

    def _throttle(self) -> None:
        wait = self.min_interval - (self._clock() - self._last)
        if wait > 0:
            self._sleep(wait)
        self._last = self._clock()

    def _rate_limit_wait(self, resp) -> float | None:
        if resp.status_code not in (403, 429):
            return None
        if resp.headers.get("Retry-After"):
            return float(resp.headers["Retry-After"])
        if resp.headers.get("X-RateLimit-Remaining") == "0" and resp.headers.get("X-RateLimit-Reset"):
            return max(0.0, float(resp.headers["X-RateLimit-Reset"]) - self._clock()) + 1.0
        return None

    def get(self, url: str, params: dict[str, Any] | None = None):
        for attempt in range(self.max_retries + 1):
            self._throttle()
            try:
                resp = self.session.get(url, params=params, timeout=30)
            except requests.RequestException as exc:
                if attempt == self.max_retries:
                    raise GitHubError(f"GET {url} failed: {exc}") from exc
                self._sleep(self.backoff * 2**attempt)
                continue
            wait = self._rate_limit_wait(resp)
            if wait is not None:
                if attempt == self.max_retries:
                    raise GitHubError(f"GET {url}: rate limited")
                log.info("rate limited, sleeping %.0fs", wait)
                self._sleep(wait)
                continue
            if resp.status_code in RETRY_STATUS:
                if attempt == self.max_retries:
                    raise GitHubError(f"GET {url}: HTTP {resp.status_code}")
                self._sleep(self.backoff * 2**attempt)
                continue
            return resp
        raise GitHubError(f"GET {url}: retries exhausted")

    def contributors(self, repo: str, limit: int | None = None) -> Iterator[str]:
        """Logins of a repository's contributors, following pagination."""
        url = f"{API_ROOT}/repos/{repo}/contributors"
        params: dict[str, Any] | None = {"per_page": 100}
        seen = 0
        while url:
            resp = self.get(url, params)
            if resp.status_code in (204, 404, 451):
                return
            if resp.status_code != 200:
                raise GitHubError(f"{repo}: contributors HTTP {resp.status_code}")
            for item in resp.json() or []:
                if item.get("type") == "Bot" or not item.get("login"):
                    continue
                yield item["login"]
                seen += 1
                if limit is not None and seen >= limit:
                    return
            url = resp.links.get("next", {}).get("url")
            params = None

    def profile_name(self, login: str) -> str | None:
        if login not in self._names:
            resp = self.get(f"{API_ROOT}/users/{login}")
            self._names[login] = resp.json().get("name") if resp.status_code == 200 else None
        return self._names[login]


def fetch_profiles(
    repos: Iterable[str],
    out_path: str | Path,
    client: GitHubClient,
    *,
    max_contributors: int | None = None,
) -> int:
    """Append profile records for every repository not already in ``out_path``.

    Returns the number of repositories fetched in this call.
    """
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    done = completed_repos(out_path)
    fetched = 0
    with open(out_path, "a", encoding="utf-8") as out:
        for repo in repos:
            if repo in done:
                continue
            rows = [
                {"repo": repo, "login": login, "name": client.profile_name(login)}
                for login in client.contributors(repo, max_contributors)
            ]
            if not rows:
                # marker row so the repository counts as done on resume
                rows = [{"repo": repo, "login": None, "name": None}]
            out.write("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows))
            out.flush()
            done.add(repo)
            fetched += 1
    return fetched
