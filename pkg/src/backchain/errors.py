"""Exception types shared across the package."""

from __future__ import annotations


class BackchainError(Exception):
    """Base class for all package-specific errors."""


class ParseError(BackchainError):
    """A sentence did not match any registered template.

    ``position`` is the character offset of the first fragment that could
    not be matched (best effort, 0 when no template prefix applied).
    """

    def __init__(self, message: str, sentence: str = "", position: int = 0):
        super().__init__(message)
        self.sentence = sentence
        self.position = position


class SchemaError(BackchainError):
    """A JSON document violated the canonical example schema.

    ``path`` points at the offending node, e.g. ``$.rules[2].consequent.sign``.
    """

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class UnificationError(BackchainError):
    """A rule was asked to decompose a goal its consequent does not unify with."""


class BackendError(BackchainError):
    """A reasoning backend failed mid-proof; carries the partial trace if any."""

    def __init__(self, message: str, partial_trace=None):
        super().__init__(message)
        self.partial_trace = partial_trace


class TransportError(BackendError):
    """The completion endpoint could not be reached after the configured retries."""


class CompletionParseError(BackendError):
    """A completion did not match the module's output grammar."""

    def __init__(self, message: str, completion: str = ""):
        super().__init__(message)
        self.completion = completion


class PromptPackError(BackchainError):
    """A prompt pack is missing demonstrations or was asked to render degenerate input."""


class InconsistencyError(BackchainError):
    """A theory derives some atom in both polarities."""

    def __init__(self, message: str, atom=None):
        super().__init__(message)
        self.atom = atom


class GenerationExhausted(BackchainError):
    """The generator could not fill a (label, depth) cell within its retry budget."""


class PoolCollisionError(BackchainError):
    """A perturbation replacement token already occurs in the dataset vocabulary."""
