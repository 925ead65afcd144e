from abc import abstractmethod
from pathlib import Path

from core.abstract import Campaign
from core.constants import HISTORY_FILE_NAME
from core.utils import Printter
from spiking.neuron import SimConfig

from .report import Report, read_history


class BaseCampaign(Campaign):
    """Shared setup of the campaigns: dynamics, FP8 flags, output and report

    Subclasses implement `run()`, which fills `self.reporter` and returns the
    campaign specific fields of the report document.
    """

    name = "campaign"

    def __init__(self, settings: dict):
        self.settings = settings
        self.options: dict = settings.get("campaign", {})
        self.cfg = SimConfig.from_settings(settings)
        self.saturate = bool(settings["fp8"]["saturate"])
        self.fast_check = bool(self.options.get("fast_check", False))
        self.out_dir = Path(settings["output"]["dir"])
        self.format = settings["output"]["format"]
        self.display = Printter(self.name.upper())
        self.reporter = Report(
            self.name,
            {**self.cfg.echo(), "saturate": self.saturate, "fast_check": self.fast_check},
        )

    @property
    def engine(self) -> str:
        """`oracle` tables in fast-check mode, else the spiking circuits"""
        return "oracle" if self.fast_check else "spiking"

    def equivalence_proven(self) -> bool:
        """Whether passing verify-mul and verify-add runs with the same saturation
        flag are recorded in the history of the output folder

        Fast-check campaigns replace the spiking units by the oracle tables; the
        substitution is only backed by these exhaustive runs.
        """
        path = self.out_dir / HISTORY_FILE_NAME
        history = read_history(path)
        proven = {
            run["kind"]
            for run in history.values()
            if run.get("passed") and run.get("saturate") == self.saturate
        }
        ok = {"verify-mul", "verify-add"} <= proven
        if not ok:
            self.reporter.warn(
                "Oracle ops substituted without a recorded exhaustive verification",
                f"run verify-mul and verify-add with --out {self.out_dir} first",
            )
        return ok

    @abstractmethod
    def run(self) -> dict:
        """Campaign logic

        Returns:
            dict: Fields of the report document
        """
        raise NotImplementedError("run() not implemented")

    def start(self) -> Report:
        self.display(f"Starting ({self.reporter.engine})", category="info")
        self.reporter.info(f"Campaign {self.name} started", f"engine: {self.reporter.engine}")
        fields = self.run()
        document = self.reporter.finish(**fields)
        self.reporter.export(self.out_dir, self.format)
        self.display(
            f"{'PASSED' if document.passed else 'FAILED'} in {document.wall_time:.1f}s",
            category="success" if document.passed else "error",
        )
        return self.reporter
