"""Exception hierarchy shared by every sewglyph module."""


class SewError(Exception):
    """Base class for all sewglyph errors."""


class ConfigError(SewError, ValueError):
    """Invalid configuration or column mapping."""


class UnsupportedGlyph(SewError, KeyError):
    def __init__(self, ch):
        super().__init__(ch)
        self.ch = ch

    def __str__(self):
        return f"no glyph for {self.ch!r} (U+{ord(self.ch):04X})" if len(self.ch) == 1 else f"no glyph for {self.ch!r}"


class SquareTooSmall(SewError, ValueError):
    pass


class BlueprintOverflow(SewError, ValueError):
    pass


class BlueprintFormatError(SewError, ValueError):
    pass


class WordTooLong(SewError, ValueError):
    pass


class NormalizationError(SewError, ValueError):
    def __init__(self, field, value):
        super().__init__(f"unrecognized value for {field}: {value!r}")
        self.field = field
        self.value = value


class EmptyCorpus(SewError, ValueError):
    pass


class SplitError(SewError, ValueError):
    pass


class CorpusIOError(SewError, OSError):
    pass


class TrainError(SewError, ValueError):
    pass


class EvalError(SewError, ValueError):
    pass
