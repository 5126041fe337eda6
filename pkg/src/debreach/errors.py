class InvalidArgument(ValueError):
    pass


class MalformedAnnotation(ValueError):
    pass


class CorruptStream(ValueError):
    """Raised by the inflater; ``offset`` is the byte position where decoding failed."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)
        self.offset = offset


class FactsParseError(ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
