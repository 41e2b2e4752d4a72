"""Exception taxonomy shared by every engine module.

All engine-raised exceptions derive from :class:`EngineError` so callers
(CLI, HTTP service) can map them to exit codes / status codes in one place.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all nodemind errors."""


# --- mind map ---------------------------------------------------------------


class EmptyTopic(EngineError):
    """A map cannot be created from a blank topic."""


class EmptyText(EngineError):
    """Node text must be non-empty after trimming."""


class UnknownNode(EngineError):
    """Referenced node id does not exist in the map."""


class CannotDeleteRoot(EngineError):
    """The root node is not deletable."""


class CycleError(EngineError):
    """Moving a subtree under itself or one of its descendants."""


class NoHistory(EngineError):
    """Undo/redo requested with an empty stack."""


# --- outline parsing --------------------------------------------------------


class EmptyInput(EngineError):
    """Parser input was blank."""


class NoHeadings(EngineError):
    """Parser input contained no '#' heading line."""


class MultipleRoots(EngineError):
    """Standalone outline contained more than one top-level entry."""


class OrphanEntry(EngineError):
    """Standalone outline did not start at the top level."""


# --- prompt building --------------------------------------------------------


class EmptyQuery(EngineError):
    """Generation/routing requires a non-empty query."""


class EmptyQuestion(EngineError):
    """Node exploration requires a non-empty question."""


class ConfigError(EngineError):
    """Prompt/routing config file is missing, unversioned, or malformed."""


# --- LLM access -------------------------------------------------------------


class ScriptExhausted(EngineError):
    """Scripted provider ran out of queued responses."""


# --- enrichment -------------------------------------------------------------


class GenerationMalformed(EngineError):
    """LLM response could not be turned into the expected structure.

    Carries the raw response text for audit.
    """

    def __init__(self, message: str, raw: str = ""):
        super().__init__(message)
        self.raw = raw


class RedundantContent(EngineError):
    """Generated candidate repeats existing siblings beyond the threshold."""

    def __init__(self, message: str, raw: str = ""):
        super().__init__(message)
        self.raw = raw


class NoExamples(EngineError):
    """Examples generation yielded no attachable candidates."""

    def __init__(self, message: str, raw: str = ""):
        super().__init__(message)
        self.raw = raw


# --- persistence ------------------------------------------------------------
# Plain file I/O failures surface as the builtin OSError; only document-level
# problems get dedicated classes.


class VersionError(EngineError):
    """Document format_version is not supported."""


class CorruptDocument(EngineError):
    """Document violates a map invariant (duplicate ids, bad depths, ...)."""
