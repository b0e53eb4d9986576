"""Exception hierarchy. Every error carries a short machine-readable
category used by the CLI for exit reporting."""


class NfdmError(Exception):
    category = "error"


class UnitTagError(NfdmError):
    """Operation applied to a signal with the wrong unit tag."""

    category = "unit-tag"


class GridError(NfdmError):
    """Grid too small, too coarse, or not covering the requested points."""

    category = "grid"


class BlowupError(NfdmError):
    """Non-finite samples appeared during propagation."""

    category = "blowup"

    def __init__(self, msg, step=None):
        super().__init__(msg)
        self.step = step


class GlmConditioningError(NfdmError):
    """GLM system condition estimate exceeded the trust threshold."""

    category = "glm-conditioning"


class FitError(NfdmError):
    """Noise-model fit could not be performed (insufficient data)."""

    category = "fit"


class ConfigError(NfdmError):
    category = "config"
