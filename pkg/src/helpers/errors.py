"""
File: errors.py
File-Path: src/helpers/errors.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    exception hierarchy shared by every coldmap package

Inputs:
    module name and message

Outputs:
    ColdmapError subclasses whose str() is prefixed with the raising module
"""

from typing import Dict, Optional


class ColdmapError(Exception):
    """base error, message is qualified by the module that raised it"""

    module = "coldmap"

    def __init__(self, message: str, module: Optional[str] = None):
        if module is not None:
            self.module = module
        self.detail = message
        super().__init__(f"{self.module}: {message}")


class RatingFileError(ColdmapError):
    """malformed ratings file, carries the offending line number"""

    module = "dataset"

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class EmptyDataError(ColdmapError):
    module = "dataset"


class SplitError(ColdmapError):
    module = "dataset"


class ConfigError(ColdmapError):
    """invalid hyperparameters, `errors` maps field -> message"""

    module = "config"

    def __init__(self, errors: Dict[str, str], module: Optional[str] = None):
        self.errors = dict(errors)
        joined = "; ".join(f"{field}: {msg}" for field, msg in sorted(self.errors.items()))
        super().__init__(joined, module)


class DimensionError(ColdmapError):
    pass


class LineSearchError(ColdmapError):
    module = "mfus"


class TrainingError(ColdmapError):
    module = "mfus"


class GbtError(ColdmapError):
    module = "gbt"


class MappingError(ColdmapError):
    module = "mapping"


class LeakageError(ColdmapError):
    module = "eval"


class ArtifactError(ColdmapError):
    module = "artifact"


class UnknownMethodError(ConfigError):
    """a method name outside the supported set"""


class MetricError(ColdmapError):
    module = "eval"
