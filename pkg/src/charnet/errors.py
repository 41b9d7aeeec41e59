"""Exception hierarchy.

``InputError`` covers problems with what the user handed us (files, config,
annotations); ``PipelineError`` covers contract violations between stages.
The CLI maps the first to exit code 1 and the second to exit code 2.
"""


class CharnetError(Exception):
    """Base class for every error raised by this package."""


class InputError(CharnetError):
    pass


class PipelineError(CharnetError):
    pass


class EmptyDocument(InputError):
    pass


class UnbalancedMarkers(InputError):
    pass


class MalformedInput(InputError):
    def __init__(self, line, detail=""):
        self.line = line
        self.detail = detail
        msg = f"line {line}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class MalformedLexicon(MalformedInput):
    pass


class MalformedGold(InputError):
    pass


class DanglingReference(MalformedGold):
    pass


class ConfigError(InputError):
    pass


class UnknownTag(PipelineError):
    def __init__(self, raw):
        self.raw = raw
        super().__init__(f"no mapping for tag {raw!r}")


class AlignmentError(PipelineError):
    pass


class DuplicateLayer(PipelineError):
    pass


class EmptyGroup(PipelineError):
    pass


class UnknownGroup(PipelineError):
    pass


class InconsistentInput(PipelineError):
    pass


class UnsupportedFormat(PipelineError):
    pass


class DocumentMismatch(PipelineError):
    pass


class EmptyReportSet(PipelineError):
    pass


class FixtureError(CharnetError):
    pass


class StageError(CharnetError):
    """Wraps a failure with the name of the pipeline stage that raised it."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
