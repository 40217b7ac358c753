"""Package ingestion, size filtering, and labeled-dataset manifests.

A package under review is modeled as an immutable :class:`PackageArtifact`
holding one :class:`SourceFile` per regular file. Packages load from either
a directory or an npm-layout gzip tarball. Dataset manifests are JSON-lines
files mapping package paths to ground-truth labels.
"""

from __future__ import annotations

import hashlib
import json
import math
import tarfile
from dataclasses import dataclass, field
from pathlib import Path, PurePosixPath

from .errors import PkgSentryError

LABELS = ("malicious", "neutral")

DEFAULT_MAX_FILES = 25
DEFAULT_MAX_SIZE_BYTES = 175 * 1024

# Inclusion weight for packages under the size cut relative to those over it.
DEFAULT_BELOW_CUT_WEIGHT = 3.0

_KIND_BY_EXTENSION = {
    ".js": "javascript",
    ".mjs": "javascript",
    ".cjs": "javascript",
    ".jsx": "javascript",
    ".ts": "javascript",
    ".tsx": "javascript",
    ".md": "markdown",
    ".markdown": "markdown",
    ".sh": "shell",
    ".bash": "shell",
}


class CorpusError(PkgSentryError):
    """Unreadable path, corrupt archive, or malformed manifest."""


class TraversalError(CorpusError):
    """An archive member tried to escape the extraction root."""

    def __init__(self, member: str):
        self.member = member
        super().__init__(f"archive member escapes package root: {member!r}")


def estimate_tokens(text: str) -> int:
    """Deterministic token estimate: ceil(characters / 4)."""
    return math.ceil(len(text) / 4)


@dataclass(frozen=True)
class SourceFile:
    """One file of a package, decoded leniently so malformed input survives."""

    path: str
    content: str
    size_bytes: int
    kind: str
    token_estimate: int

    @classmethod
    def from_bytes(cls, path: str, raw: bytes) -> "SourceFile":
        content = raw.decode("utf-8", errors="replace")
        return cls(
            path=path,
            content=content,
            size_bytes=len(raw),
            kind=classify_kind(path, raw),
            token_estimate=estimate_tokens(content),
        )


def classify_kind(path: str, raw: bytes = b"") -> str:
    """File kind from name and extension; NUL bytes force ``other``."""
    name = PurePosixPath(path).name
    if name == "package.json":
        return "manifest"
    if b"\x00" in raw:
        return "other"
    return _KIND_BY_EXTENSION.get(PurePosixPath(name).suffix.lower(), "other")


@dataclass(frozen=True)
class PackageArtifact:
    name: str
    version: str
    files: tuple[SourceFile, ...]
    total_size_bytes: int
    label: str | None = None

    def __post_init__(self):
        paths = [f.path for f in self.files]
        if len(set(paths)) != len(paths):
            raise CorpusError(f"duplicate file paths in package {self.name!r}")
        for p in paths:
            if ".." in PurePosixPath(p).parts:
                raise TraversalError(p)
        if self.total_size_bytes != sum(f.size_bytes for f in self.files):
            raise CorpusError("total_size_bytes does not match file sizes")

    @property
    def file_count(self) -> int:
        return len(self.files)

    def file(self, path: str) -> SourceFile:
        for f in self.files:
            if f.path == path:
                return f
        raise KeyError(path)


def _clean_member_path(raw_path: str) -> str:
    """Normalize an archive member path, rejecting traversal and absolutes."""
    p = PurePosixPath(raw_path)
    if p.is_absolute() or ".." in p.parts:
        raise TraversalError(raw_path)
    parts = [part for part in p.parts if part != "."]
    # npm tarballs nest everything under a package/ root
    if parts and parts[0] == "package":
        parts = parts[1:]
    if not parts:
        raise TraversalError(raw_path)
    return "/".join(parts)


def _load_from_tarball(path: Path) -> dict[str, bytes]:
    contents: dict[str, bytes] = {}
    try:
        with tarfile.open(path, "r:gz") as tf:
            for member in tf:
                if not member.isfile():
                    continue
                rel = _clean_member_path(member.name)
                fh = tf.extractfile(member)
                if fh is None:
                    continue
                contents[rel] = fh.read()
    except tarfile.TarError as exc:
        raise CorpusError(f"corrupt archive {path}: {exc}") from exc
    return contents


def _load_from_directory(path: Path) -> dict[str, bytes]:
    contents: dict[str, bytes] = {}
    for file_path in sorted(path.rglob("*")):
        if not file_path.is_file():
            continue
        rel = file_path.relative_to(path).as_posix()
        contents[rel] = file_path.read_bytes()
    return contents


def load_package(
    path: str | Path,
    name: str | None = None,
    version: str | None = None,
    label: str | None = None,
) -> PackageArtifact:
    """Load a package directory or gzip tarball into a PackageArtifact.

    Files are enumerated in lexicographic path order, so loading the same
    path twice yields identical artifacts. Name and version fall back to
    the embedded package.json, then to the path stem.
    """
    path = Path(path)
    if path.is_dir():
        raw_files = _load_from_directory(path)
    elif path.is_file():
        raw_files = _load_from_tarball(path)
    else:
        raise CorpusError(f"unreadable package path: {path}")

    files = tuple(
        SourceFile.from_bytes(rel, raw) for rel, raw in sorted(raw_files.items())
    )

    if name is None or version is None:
        meta_name, meta_version = _manifest_identity(raw_files.get("package.json"))
        name = name or meta_name or path.name.removesuffix(".tgz").removesuffix(".tar.gz")
        version = version or meta_version or "0.0.0"

    return PackageArtifact(
        name=name,
        version=version,
        files=files,
        total_size_bytes=sum(f.size_bytes for f in files),
        label=label,
    )


def _manifest_identity(raw: bytes | None) -> tuple[str | None, str | None]:
    if raw is None:
        return None, None
    try:
        meta = json.loads(raw.decode("utf-8", errors="replace"))
    except json.JSONDecodeError:
        return None, None
    if not isinstance(meta, dict):
        return None, None
    name = meta.get("name")
    version = meta.get("version")
    return (
        name if isinstance(name, str) and name else None,
        version if isinstance(version, str) and version else None,
    )


def within_quartile_filter(
    pkg: PackageArtifact,
    max_files: int = DEFAULT_MAX_FILES,
    max_size_bytes: int = DEFAULT_MAX_SIZE_BYTES,
) -> bool:
    """True iff the package stays under either size limit (disjunctive)."""
    if max_files <= 0 or max_size_bytes <= 0:
        raise ValueError("thresholds must be positive")
    return pkg.file_count <= max_files or pkg.total_size_bytes <= max_size_bytes


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    label: str
    name: str
    version: str

    def identity(self) -> str:
        return f"{self.name}@{self.version}"


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[ManifestEntry, ...]
    base_dir: Path = field(default_factory=Path)

    def __len__(self) -> int:
        return len(self.entries)

    def resolve(self, entry: ManifestEntry) -> Path:
        p = Path(entry.path)
        return p if p.is_absolute() else self.base_dir / p

    def load_entry(self, entry: ManifestEntry) -> PackageArtifact:
        return load_package(
            self.resolve(entry),
            name=entry.name,
            version=entry.version,
            label=entry.label,
        )

    def label_of(self, name: str, version: str) -> str | None:
        for entry in self.entries:
            if entry.name == name and entry.version == version:
                return entry.label
        return None


def load_manifest(path: str | Path) -> DatasetManifest:
    """Read a JSON-lines dataset manifest, validating labels and paths."""
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"manifest not found: {path}")
    entries = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        missing = {"path", "label", "name", "version"} - set(row)
        if missing:
            raise CorpusError(f"{path}:{lineno}: missing fields {sorted(missing)}")
        if row["label"] not in LABELS:
            raise CorpusError(f"{path}:{lineno}: unknown label {row['label']!r}")
        entry = ManifestEntry(
            path=row["path"], label=row["label"], name=row["name"], version=row["version"]
        )
        resolved = Path(entry.path)
        if not resolved.is_absolute():
            resolved = path.parent / resolved
        if not resolved.exists():
            raise CorpusError(f"{path}:{lineno}: referenced path does not exist: {resolved}")
        entries.append(entry)
    return DatasetManifest(entries=tuple(entries), base_dir=path.parent)


def package_stats(path: str | Path) -> tuple[int, int]:
    """(file_count, total_size_bytes) for a package path without decoding."""
    path = Path(path)
    if path.is_dir():
        files = [p for p in path.rglob("*") if p.is_file()]
        return len(files), sum(p.stat().st_size for p in files)
    count = 0
    size = 0
    try:
        with tarfile.open(path, "r:gz") as tf:
            for member in tf:
                if member.isfile():
                    count += 1
                    size += member.size
    except tarfile.TarError as exc:
        raise CorpusError(f"corrupt archive {path}: {exc}") from exc
    return count, size


def _selection_key(seed: int, entry: ManifestEntry, weight: float) -> float:
    """Weighted sampling key (higher wins), stable across entry order.

    Uses the Efraimidis-Spirakis scheme u**(1/w) with u derived from a
    content hash, so the draw depends only on (seed, entry, weight).
    """
    digest = hashlib.sha256(
        f"{seed}|{entry.name}|{entry.version}|{entry.path}|{entry.label}".encode()
    ).digest()
    u = (int.from_bytes(digest, "big") + 1) / (2**256 + 1)
    return u ** (1.0 / weight)


def _allocate_by_stratum(sizes: dict[str, int], target: int) -> dict[str, int]:
    """Largest-remainder allocation of target across strata, ties by name."""
    total = sum(sizes.values())
    quotas = {label: target * size / total for label, size in sizes.items()}
    alloc = {label: int(q) for label, q in quotas.items()}
    leftover = target - sum(alloc.values())
    order = sorted(sizes, key=lambda lb: (alloc[lb] - quotas[lb], lb))
    for label in order[:leftover]:
        alloc[label] += 1
    return alloc


def sample_stratified(
    manifest: DatasetManifest,
    seed: int,
    target_count: int,
    below_cut_weight: float = DEFAULT_BELOW_CUT_WEIGHT,
    max_files: int = DEFAULT_MAX_FILES,
    max_size_bytes: int = DEFAULT_MAX_SIZE_BYTES,
) -> list[ManifestEntry]:
    """Label-stratified sample favoring packages under the size cut.

    Allocation across label strata is proportional (largest remainder);
    within a stratum, entries under the file/size cut carry
    ``below_cut_weight`` times the inclusion weight of larger ones.
    Deterministic for fixed (manifest, seed, target_count) and stable
    under permutation of manifest entries.
    """
    if target_count > len(manifest):
        raise CorpusError(
            f"target_count {target_count} exceeds manifest size {len(manifest)}"
        )
    if target_count < 0:
        raise CorpusError("target_count must be non-negative")
    if target_count == 0:
        return []

    by_label: dict[str, list[ManifestEntry]] = {}
    for entry in manifest.entries:
        by_label.setdefault(entry.label, []).append(entry)

    alloc = _allocate_by_stratum({lb: len(es) for lb, es in by_label.items()}, target_count)

    chosen: set[ManifestEntry] = set()
    for label, entries in by_label.items():
        k = alloc.get(label, 0)
        if k >= len(entries):
            chosen.update(entries)
            continue
        keyed = []
        for entry in entries:
            count, size = package_stats(manifest.resolve(entry))
            below = count <= max_files or size <= max_size_bytes
            weight = below_cut_weight if below else 1.0
            keyed.append((_selection_key(seed, entry, weight), entry))
        keyed.sort(key=lambda kv: kv[0], reverse=True)
        chosen.update(entry for _, entry in keyed[:k])

    return [entry for entry in manifest.entries if entry in chosen]
