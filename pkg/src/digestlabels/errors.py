"""Exception hierarchy shared across the package."""


class DigestLabelsError(Exception):
    """Base class for every error raised by this package."""


class MalformedCveId(DigestLabelsError):
    pass


class ProviderUnavailable(DigestLabelsError):
    pass


class ScriptExhausted(DigestLabelsError):
    pass


class ResponseTooLong(DigestLabelsError):
    pass


class EmptyText(DigestLabelsError):
    pass


class DimensionMismatch(DigestLabelsError):
    pass


class FetchFailed(DigestLabelsError):
    pass


class MalformedResponse(DigestLabelsError):
    pass


class ParseError(DigestLabelsError):
    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class DuplicateRecord(DigestLabelsError):
    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class MissingTemplate(DigestLabelsError):
    def __init__(self, aspect_type):
        super().__init__(f"no regularization template registered for {aspect_type}")
        self.aspect_type = aspect_type


class UnparseableResponse(DigestLabelsError):
    pass


class EmptyInput(DigestLabelsError):
    pass


class TooFewValues(DigestLabelsError):
    pass


class NoExamples(DigestLabelsError):
    pass


class EmptyCorpus(DigestLabelsError):
    pass


class NoSources(DigestLabelsError):
    pass


class NotFound(DigestLabelsError):
    pass


class SchemaViolation(DigestLabelsError):
    pass
