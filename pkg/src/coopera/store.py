"""Project persistence.

One JSON document per project at ``<data_dir>/<project_id>.json``.
Writes go through a temp file in the same directory followed by
os.replace, so a crash mid-write leaves either the old document or the
new one, never a torn file. Invalid projects are rejected before
anything touches disk.

Both stores hand out fresh deserialized values on every load, so
callers can mutate what they got back without corrupting stored state.
"""

from __future__ import annotations

import json
import os
import re
import tempfile
from pathlib import Path

from .canonical import project_from_json, project_json
from .errors import NotFoundError, StorageError, ValidationError
from .model import RevisionEntry, ScriptProject, Stage
from .validation import validate_project

ENV_DATA_DIR = "COOPERA_DATA_DIR"
DEFAULT_DATA_DIR = "./data"

_ID_PATTERN = re.compile(r"^[a-z0-9][a-z0-9-]{0,63}$")


def default_data_dir() -> Path:
    return Path(os.environ.get(ENV_DATA_DIR) or DEFAULT_DATA_DIR)


def _check_id(project_id: str) -> str:
    # Ids double as file names; reject anything that could escape data_dir.
    if not _ID_PATTERN.match(project_id or ""):
        raise NotFoundError(f"no project {project_id!r}")
    return project_id


def _require_valid(project: ScriptProject) -> None:
    report = validate_project(project)
    if not report.ok:
        raise ValidationError(
            "refusing to save an invalid project: " + "; ".join(v.message for v in report.violations),
            violations=report.violations,
        )


def _summary(project: ScriptProject) -> dict:
    return {
        "id": project.id,
        "title": project.title,
        "revision": project.revision,
        "stages": {stage.key: project.state_of(stage).value for stage in Stage},
    }


class FileStore:
    def __init__(self, data_dir: str | Path | None = None):
        self.data_dir = Path(data_dir) if data_dir is not None else default_data_dir()

    def _path(self, project_id: str) -> Path:
        return self.data_dir / f"{_check_id(project_id)}.json"

    def save(self, project: ScriptProject) -> None:
        _require_valid(project)
        _check_id(project.id)
        text = project_json(project)
        try:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            fd, temp_name = tempfile.mkstemp(
                dir=self.data_dir, prefix=f".{project.id}.", suffix=".tmp"
            )
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as handle:
                    handle.write(text)
                    handle.flush()
                    os.fsync(handle.fileno())
                os.replace(temp_name, self._path(project.id))
            except BaseException:
                try:
                    os.unlink(temp_name)
                except OSError:
                    pass
                raise
        except OSError as exc:
            raise StorageError(f"could not write project {project.id}: {exc}") from exc

    def load(self, project_id: str) -> ScriptProject:
        path = self._path(project_id)
        try:
            text = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise NotFoundError(f"no project {project_id!r}") from None
        except OSError as exc:
            raise StorageError(f"could not read project {project_id}: {exc}") from exc
        try:
            return project_from_json(text)
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise StorageError(f"project file for {project_id} is corrupt: {exc}") from exc

    def exists(self, project_id: str) -> bool:
        try:
            return self._path(project_id).is_file()
        except NotFoundError:
            return False

    def list(self) -> list[dict]:
        if not self.data_dir.is_dir():
            return []
        summaries = []
        for path in sorted(self.data_dir.glob("*.json")):
            try:
                summaries.append(_summary(self.load(path.stem)))
            except (NotFoundError, StorageError):
                continue  # skip foreign or half-written files
        return summaries

    def history(self, project_id: str, stage: Stage | None = None) -> list[RevisionEntry]:
        project = self.load(project_id)
        entries = project.revision_log
        if stage is not None:
            entries = [entry for entry in entries if entry.stage == stage]
        return entries

    def delete(self, project_id: str) -> None:
        path = self._path(project_id)
        try:
            path.unlink()
        except FileNotFoundError:
            raise NotFoundError(f"no project {project_id!r}") from None
        except OSError as exc:
            raise StorageError(f"could not delete project {project_id}: {exc}") from exc


class MemoryStore:
    """Same contract as FileStore, backed by a dict of JSON text."""

    def __init__(self):
        self._documents: dict[str, str] = {}

    def save(self, project: ScriptProject) -> None:
        _require_valid(project)
        self._documents[_check_id(project.id)] = project_json(project)

    def load(self, project_id: str) -> ScriptProject:
        text = self._documents.get(_check_id(project_id))
        if text is None:
            raise NotFoundError(f"no project {project_id!r}")
        return project_from_json(text)

    def exists(self, project_id: str) -> bool:
        return project_id in self._documents

    def list(self) -> list[dict]:
        return [_summary(self.load(pid)) for pid in sorted(self._documents)]

    def history(self, project_id: str, stage: Stage | None = None) -> list[RevisionEntry]:
        entries = self.load(project_id).revision_log
        if stage is not None:
            entries = [entry for entry in entries if entry.stage == stage]
        return entries

    def delete(self, project_id: str) -> None:
        if self._documents.pop(_check_id(project_id), None) is None:
            raise NotFoundError(f"no project {project_id!r}")
