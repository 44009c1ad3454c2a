"""Exception types shared by the file formats."""


class UnsupportedFormatError(ValueError):
    """File header is malformed or names a format/version we do not read."""


class TruncatedPayloadError(UnsupportedFormatError):
    """File body is shorter (or longer) than its header promises."""
