"""Harvest executable documentation examples for an npm package.

The pipeline walks package name -> repository URL -> README text -> fenced
code blocks tagged ``js`` or ``javascript``.  Fetching is pluggable: a live
fetcher talks to the npm registry and raw.githubusercontent.com, a fixture
fetcher reads the same shapes from a local directory laid out as
``fixtures/<package>/meta.json`` plus a README file.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

README_NAMES = (
    "README.md",
    "readme.md",
    "Readme.md",
    "README.markdown",
    "readme.markdown",
    "README",
    "readme",
)


class FetchError(RuntimeError):
    """A fetch failed (network, I/O); distinct from a package without data."""


@dataclass(frozen=True, slots=True)
class CodeExample:
    index: int
    language: str
    code: str


class FixtureFetcher:
    """Serves package metadata and READMEs from a fixture directory."""

    def __init__(self, root) -> None:
        self.root = Path(root)

    def package_metadata(self, package: str) -> dict | None:
        meta = self.root / package / "meta.json"
        if not meta.is_file():
            return None
        try:
            return json.loads(meta.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise FetchError(f"cannot read fixture metadata for {package}: {exc}") from exc

    def read_repository_file(self, package: str, repo_url: str, filename: str) -> str | None:
        path = self.root / package / filename
        if not path.is_file():
            return None
        try:
            return path.read_text(encoding="utf-8")
        except OSError as exc:
            raise FetchError(f"cannot read fixture file {path}: {exc}") from exc


class LiveFetcher:
    """Talks to the npm registry and raw.githubusercontent.com."""

    def __init__(self, registry: str = "https://registry.npmjs.org", timeout: float = 30.0) -> None:
        self.registry = registry.rstrip("/")
        self.timeout = timeout

    def package_metadata(self, package: str) -> dict | None:
        import requests

        try:
            resp = requests.get(f"{self.registry}/{package}", timeout=self.timeout)
        except requests.RequestException as exc:
            raise FetchError(f"registry request failed for {package}: {exc}") from exc
        if resp.status_code == 404:
            return None
        if resp.status_code != 200:
            raise FetchError(f"registry returned {resp.status_code} for {package}")
        return resp.json()

    def read_repository_file(self, package: str, repo_url: str, filename: str) -> str | None:
        import requests

        m = re.search(r"github\.com[/:]([^/]+)/([^/#?]+)", repo_url)
        if not m:
            return None
        owner, repo = m.group(1), m.group(2)
        repo = re.sub(r"\.git$", "", repo)
        url = f"https://raw.githubusercontent.com/{owner}/{repo}/HEAD/{filename}"
        try:
            resp = requests.get(url, timeout=self.timeout)
        except requests.RequestException as exc:
            raise FetchError(f"readme request failed: {exc}") from exc
        if resp.status_code == 200:
            return resp.text
        return None


def resolve_repository(package: str, fetcher) -> str | None:
    """Resolve a package name to its repository URL via `npm view`-style
    metadata.  Returns None when the package has no repository entry; raises
    FetchError when the lookup itself fails.
    """

    meta = fetcher.package_metadata(package)
    if meta is None:
        return None
    repository = meta.get("repository")
    if isinstance(repository, dict):
        url = repository.get("url")
    else:
        url = repository
    if isinstance(url, str) and url.strip():
        return url.strip()
    return None


def fetch_readme(package: str, repo_url: str, fetcher) -> str | None:
    """Fetch the repository README, trying common naming conventions."""

    for name in README_NAMES:
        text = fetcher.read_repository_file(package, repo_url, name)
        if text is not None:
            return text
    return None


_FENCE_RE = re.compile(r"^ {0,3}(`{3,})(.*)$")
_JS_TAGS = frozenset({"js", "javascript"})


def _info_token(info: str) -> str:
    token = info.strip().split()[0] if info.strip() else ""
    # tolerate attribute suffixes glued to the tag, e.g. js{.line-numbers}
    token = re.split(r"[{,;]", token)[0]
    return token.lower()


def extract_code_examples(markdown: str) -> list[CodeExample]:
    """Extract fenced code blocks tagged js or javascript, in source order.

    Indices are 0..n-1 over the retained blocks.  A fence left unclosed runs
    to the end of the document and is retained.  Other languages and untagged
    blocks are consumed but dropped.
    """

    examples: list[CodeExample] = []
    lines = markdown.splitlines()
    i = 0
    n = len(lines)
    while i < n:
        m = _FENCE_RE.match(lines[i].rstrip("\r"))
        if not m:
            i += 1
            continue
        fence, info = m.group(1), m.group(2)
        language = _info_token(info)
        body: list[str] = []
        i += 1
        while i < n:
            line = lines[i].rstrip("\r")
            stripped = line.strip()
            if stripped and set(stripped) == {"`"} and len(stripped) >= len(fence):
                i += 1
                break
            body.append(line)
            i += 1
        if language in _JS_TAGS:
            examples.append(
                CodeExample(index=len(examples), language=language, code="\n".join(body) + "\n")
            )
    return examples
