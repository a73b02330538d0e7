class TableGraphError(Exception):
    """Base exception for all tablegraph errors.

    Not a ValueError: pydantic validators raising these propagate unchanged.
    """

    exit_code: int = 2

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ConfigError(TableGraphError):
    """Invalid settings or command-line usage"""

    exit_code = 1


class UsageError(ConfigError):
    """Raised for malformed command lines or run config files"""


class ConflictingOverride(ConfigError):
    """Raised when one setting is given twice with different values"""


class InvalidAlpha(ConfigError):
    """Raised when the adjacency adjustment factor is not positive"""


class InvalidK(ConfigError):
    """Raised when the edge-pruning multiplier is below 1"""


class InvalidFraction(ConfigError):
    """Raised when a keep fraction falls outside (0, 1]"""


class InvalidThreshold(ConfigError):
    """Raised when an IoU threshold falls outside (0, 1]"""


class UnknownName(ConfigError):
    """Raised for an index head or segmentation class that does not exist"""


class DataError(TableGraphError):
    """Input data that cannot be parsed or used"""

    exit_code = 2


class InvalidBox(DataError):
    """Raised for boxes with nonpositive or non-finite size"""


class InvalidIndex(DataError):
    """Raised for logical indices outside [0, T-1]"""


class InvalidPrior(DataError):
    """Raised when an index prior is not in (0, 1]"""


class EmptyBatch(DataError):
    """Raised when a loss or statistic is requested over zero nodes"""


class MissingImage(DataError):
    """Raised when patch features are requested without a raster"""


class MissingLabels(DataError):
    """Raised when ground truth lacks logical locations"""


class ShapeError(DataError):
    """Raised when array shapes disagree with model parameters"""


class DatasetFormatError(DataError):
    """Raised for malformed dataset lines"""


class SegMapFormatError(DataError):
    """Raised for malformed segmentation map files"""


class ModelFormatError(DataError):
    """Raised for malformed model files"""


class ValidationFailure(TableGraphError):
    """A table that breaks a structural rule"""

    exit_code = 3


class OverlapConflict(ValidationFailure):
    """Raised when two cells claim the same logical grid slot"""

    def __init__(self, first_id: int, second_id: int, slot: tuple[int, int]):
        super().__init__(
            f"cells {first_id} and {second_id} both claim grid slot "
            f"(row {slot[0]}, col {slot[1]})"
        )
        self.first_id = first_id
        self.second_id = second_id
        self.slot = slot


class InvalidLogical(ValidationFailure):
    """Raised when a logical rectangle has start > end"""


class GeometryError(ValidationFailure):
    """Raised for infeasible or overlapping cell geometry"""


class TableInvalid(ValidationFailure):
    """Raised when validate finds violations"""


class TrainingDiverged(TableGraphError):
    """Raised when the training loss becomes non-finite"""

    exit_code = 4
