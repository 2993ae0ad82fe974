"""Exception hierarchy shared by every module."""


class TongueCurveError(Exception):
    """Base class for all errors raised by this package."""


class BoundsError(TongueCurveError, IndexError):
    pass


class ShapeError(TongueCurveError, ValueError):
    """Buffer length or grid dimensions do not match."""


class InvalidMetaError(TongueCurveError, ValueError):
    pass


class InvalidContourError(TongueCurveError, ValueError):
    pass


class FormatError(TongueCurveError, ValueError):
    """Malformed file content. ``offset`` / ``line`` locate the problem when known."""

    def __init__(self, message, *, offset=None, line=None):
        where = []
        if offset is not None:
            where.append(f"byte offset {offset}")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} (at {', '.join(where)})"
        super().__init__(message)
        self.offset = offset
        self.line = line


class ManifestError(TongueCurveError, ValueError):
    pass


class CropError(TongueCurveError, ValueError):
    pass


class RasterizeError(TongueCurveError, ValueError):
    pass


class ParameterError(TongueCurveError, ValueError):
    pass


class ExtractionError(TongueCurveError):
    """Failure inside the post-processing pipeline, tagged with the failing stage."""

    stage = None

    def __init__(self, message, *, stage=None):
        if stage is not None:
            self.stage = stage
        if self.stage:
            message = f"[{self.stage}] {message}"
        super().__init__(message)


class EmptyInputError(ExtractionError):
    stage = "filter_outliers"


class DegenerateGeometryError(ExtractionError):
    stage = "find_extremities"


class DegenerateExtremitiesError(ExtractionError):
    stage = "build_graph"


class DisconnectedPathError(ExtractionError):
    stage = "shortest_path"


class EmptyFoldError(TongueCurveError, ValueError):
    pass


class SplitError(TongueCurveError, ValueError):
    pass


class OverlayError(TongueCurveError, ValueError):
    pass
