"""Staged human-machine script co-writing.

A script grows through five gated stages (logline, characters, plots,
scenes, dialogues). Conversational tutors widen the writer's options;
functional agents produce structured drafts; every change lands in a
revision log that the analytics layer turns into edit-distance and
overlap metrics.
"""

from .engine import Engine, demo, resolve_provider
from .errors import (
    CascadeError,
    ConflictError,
    CooperaError,
    NotFoundError,
    ProviderError,
    SchemaError,
    StageOrderError,
    StorageError,
    ValidationError,
)
from .model import (
    Actor,
    Character,
    DialogueLine,
    Logline,
    PlotElement,
    Relationship,
    RevisionEntry,
    RevisionKind,
    Scene,
    ScriptProject,
    Stage,
    StageState,
    StalenessFlag,
    new_project,
)
from .pipeline import (
    StageTransition,
    StalenessReport,
    confirm_stage,
    delete_element,
    edit_element,
    generate_stage,
    regenerate_cascade,
    staleness,
    transition,
)
from .store import FileStore, MemoryStore
from .validation import ValidationReport, Violation, validate_project

__version__ = "0.1.0"

__all__ = [
    "Actor",
    "CascadeError",
    "Character",
    "ConflictError",
    "CooperaError",
    "DialogueLine",
    "Engine",
    "FileStore",
    "Logline",
    "MemoryStore",
    "NotFoundError",
    "PlotElement",
    "ProviderError",
    "Relationship",
    "RevisionEntry",
    "RevisionKind",
    "Scene",
    "SchemaError",
    "ScriptProject",
    "Stage",
    "StageOrderError",
    "StageState",
    "StageTransition",
    "StalenessFlag",
    "StalenessReport",
    "StorageError",
    "ValidationError",
    "ValidationReport",
    "Violation",
    "confirm_stage",
    "delete_element",
    "demo",
    "edit_element",
    "generate_stage",
    "new_project",
    "regenerate_cascade",
    "resolve_provider",
    "staleness",
    "transition",
    "validate_project",
    "__version__",
]
