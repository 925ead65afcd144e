from abc import ABC, abstractmethod


class SpikeFloatError(Exception):
    """Base class of every error raised by the simulator and its campaigns."""

    def __init__(self, message: str) -> None:
        super().__init__(message)


class CircuitError(SpikeFloatError):
    """Raised when a circuit is malformed (cycle, dangling port, arity mismatch)."""


class Fp8Error(SpikeFloatError):
    """Raised when an FP8 code can not take part in an operation (eg. decoding a nan)."""


class ShapeError(SpikeFloatError):
    """Raised when tensor shapes do not line up."""


class CampaignSpecError(SpikeFloatError):
    """Raised when a campaign spec, a target or a unit name is invalid."""


class DataSourceError(SpikeFloatError):
    """Raised when an external data file is missing or corrupt."""


class Campaign(ABC):
    """Abstract Campaign representation"""

    name: str = "campaign"

    def __init__(self, settings: dict):
        """Initialize the Campaign with the merged settings (file + command line)

        Args:
            settings (dict): Configuration
        """
        raise NotImplementedError("init() not implemented")

    @abstractmethod
    def start(self):
        """Starts the campaign execution with your own logic

        Returns:
            campaigns.report.Report: The filled report. `report.passed` drives the exit status.
        """
        raise NotImplementedError("start() not implemented")
