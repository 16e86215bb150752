"""Error hierarchy shared by the library and the command line tool"""
from typing import Optional

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


class GliomaSegError(Exception):
    exit_status: int = 1

    def __init__(self, message: Optional[str] = None):
        super(GliomaSegError, self).__init__(message or self.__class__.__name__)
        self.message = message or ""

    @property
    def code(self) -> str:
        return self.__class__.__name__

    def one_line(self) -> str:
        detail = " ".join(str(self.message).split())
        return f"gliomaseg: error {self.code}: {detail}"


class ConfigError(GliomaSegError):
    exit_status = EXIT_CONFIG


class DataError(GliomaSegError):
    exit_status = EXIT_DATA


class NumericError(GliomaSegError):
    exit_status = EXIT_NUMERIC


# volume ingestion
class BadMagic(DataError):
    pass


class UnsupportedDatatype(DataError):
    def __init__(self, datatype: int):
        super(UnsupportedDatatype, self).__init__(f"NIfTI datatype code {datatype} is not supported")
        self.datatype = datatype


class TruncatedPayload(DataError):
    pass


class NonFiniteVoxel(DataError):
    pass


class SidecarParse(DataError):
    pass


class LengthMismatch(DataError):
    pass


class IoFailure(DataError):
    pass


class MissingModality(DataError):
    pass


class DimsMismatch(DataError):
    pass


class UnknownLabelValue(DataError):
    def __init__(self, value: float):
        super(UnknownLabelValue, self).__init__(f"label value {value} is not in the declared encoding")
        self.value = value


class GridMismatch(DataError):
    pass


class MissingPrediction(DataError):
    pass


class EmptyBox(DataError):
    pass


class RecordMismatch(DataError):
    pass


class CheckpointMismatch(DataError):
    pass


class PatchLargerThanVolume(DataError):
    pass


class IndivisibleDims(DataError):
    pass


# numerics
class ShapeMismatch(NumericError):
    pass


class UnsupportedKernel(NumericError):
    pass


class DomainError(NumericError):
    pass


class NonScalarLoss(NumericError):
    pass


class DegenerateSpatial(NumericError):
    pass


class NonPositiveSigma(NumericError):
    pass


class NonPositiveMagnitude(NumericError):
    pass


class NonFiniteLoss(NumericError):
    pass


# configuration
class BadVariantId(ConfigError):
    pass


class UnknownLoss(ConfigError):
    pass


class UnknownOptimizer(ConfigError):
    pass


class BadOverride(ConfigError):
    pass


class BadPreset(ConfigError):
    pass


class BadPatchSpec(ConfigError):
    pass


class BadModelConfig(ConfigError):
    pass


# non-fatal conditions, raised through warnings.warn
class ConstantRegion(UserWarning):
    pass


class EmptyMaskFallback(UserWarning):
    pass
