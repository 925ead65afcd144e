import io
import json
import time
from datetime import datetime
from pathlib import Path
from typing import Literal, Union

import pandas as pd
from openpyxl.styles import Border, PatternFill, Side

from core.abstract import CampaignSpecError
from core.constants import (
    HISTORY_FILE_NAME,
    IMPORTANCE_COLOR_MAP,
    IMPORTANCE_MAP,
    OUTPUT_FOLDER,
    POSSIBLE_FORMATS,
)
from core.utils import Printter, atomic_write

from .schemas import DOCUMENT_MODELS, ConfigEcho, Criterion, ReportDocument

display = Printter("REPORT")


def read_history(path: Path, keep_corrupt: bool = False) -> dict:
    """Runs recorded in a history file (empty when there is none)

    An unreadable file is reported with a warning and read as empty.

    Args:
        path (Path): History file
        keep_corrupt (bool, optional): Copy an unreadable file to `<name>.corrupt`
            before it gets overwritten. Defaults to False.

    Returns:
        dict: Summaries keyed by report file name
    """
    if not path.exists():
        return {}
    try:
        history = json.loads(path.read_text(encoding="utf-8"))
        if not isinstance(history, dict):
            raise ValueError(f"expected an object, got {type(history).__name__}")
    except ValueError as e:
        display(f"Unreadable history {path}: {e}", category="warn")
        if keep_corrupt:
            backup = path.with_name(f"{path.name}.corrupt")
            atomic_write(backup, path.read_bytes())
            display(f"Old history kept as {backup}, starting a new one", category="warn")
        return {}
    return history


class Report:
    """The Report Generator to friendly-read campaign progress and results"""

    def __init__(self, kind: str, config: dict):
        self.kind = kind
        self.config = ConfigEcho.model_validate(config)
        self.columns = ["Category", "Subject", "Message", "Observation", "Timestamp"]
        self.df = pd.DataFrame(columns=self.columns)

        self.__messages_stack = []
        self.__current_subject = ""
        self.__started = time.perf_counter()
        self.started_at = datetime.now()

        self.criteria: list[Criterion] = []
        self.tables: dict[str, pd.DataFrame] = {}
        self.document: ReportDocument | None = None
        self.filename = f"{kind}_{self.started_at:%Y%m%d-%H%M%S-%f}"

        self.stats = {
            "evaluations": 0,
            "mismatches": 0,
            "spikes": 0,
            "neuron_updates": 0,
            "warnings": 0,
            "errors": 0,
            "wall_time": 0.0,
            "pass_rate": 1.0,
            "mean_sparsity": 0.0,
        }

    @property
    def engine(self) -> str:
        return "fast-check" if self.config.fast_check else "spiking"

    @property
    def wall_time(self) -> float:
        return time.perf_counter() - self.__started

    @property
    def passed(self) -> bool:
        """No error was logged and every criterion holds"""
        return self.stats["errors"] == 0 and all(c.passed for c in self.criteria)

    def set_subject(self, subject: str):
        """Set the unit, target or table row the next messages are about

        Args:
            subject (str): The subject
        """
        self.__current_subject = subject

    def clean_subject(self):
        """Clean the current subject"""
        self.__current_subject = ""

    def __add_message(
        self,
        message: str,
        importance: Literal["debug", "info", "warn", "error", "success"],
        observation: str = "",
    ):
        """Low level function to add a message to the report

        Args:
            message (str): The message
            importance (str): The message importance mapped
            observation (str, optional): Some observation about the message. Defaults to "".
        """
        self.__messages_stack.append(
            {
                "Category": IMPORTANCE_MAP[importance],
                "Subject": self.__current_subject,
                "Message": message,
                "Observation": observation.strip(),
                "Timestamp": datetime.now().strftime("%Y-%m-%d %H:%M:%S"),
            }
        )
        self.df = pd.DataFrame(self.__messages_stack, columns=self.columns)

    def debug(self, message: str, observation: str = ""):
        self.__add_message(message, "debug", observation)

    def info(self, message: str, observation: str = ""):
        self.__add_message(message, "info", observation)

    def warn(self, message: str, observation: str = ""):
        """Add a warning message (counted in the `warnings` stat)"""
        self.increment_stat("warnings")
        self.__add_message(message, "warn", observation)

    def error(self, message: str, observation: str = ""):
        """Add an error message. Any error makes the report fail."""
        self.increment_stat("errors")
        self.__add_message(message, "error", observation)

    def success(self, message: str, observation: str = ""):
        self.__add_message(message, "success", observation)

    def check(self, name: str, passed: bool, detail: str = "") -> bool:
        """Record an acceptance criterion and log its outcome

        Returns:
            bool: `passed`
        """
        self.criteria.append(Criterion(name=name, passed=bool(passed), detail=detail))
        if passed:
            self.success(f"{name}: ok", detail)
        else:
            self.error(f"{name}: FAILED", detail)
        return bool(passed)

    def add_table(self, name: str, table: pd.DataFrame):
        """Attach a result table (exported as CSV file or spreadsheet sheet)"""
        self.tables[name] = table

    def increment_stat(self, key: str, value: Union[int, float] = 1):
        """Increment stats in the report

        Args:
            key (str): The key to increment
            value (Union[int, float], optional): The value to increment. Defaults to 1.
        """
        self.stats[key] = self.stats.get(key, 0) + value

        self.stats["pass_rate"] = (
            1 - self.stats["mismatches"] / self.stats["evaluations"]
            if self.stats["evaluations"] > 0
            else 1.0
        )
        self.stats["mean_sparsity"] = (
            self.stats["spikes"] / self.stats["neuron_updates"]
            if self.stats["neuron_updates"] > 0
            else 0.0
        )

    def finish(self, **fields) -> ReportDocument:
        """Validate the campaign results into the versioned document

        Args:
            **fields: Campaign specific fields of the document model

        Returns:
            ReportDocument: The validated document
        """
        self.stats["wall_time"] = self.wall_time
        model = DOCUMENT_MODELS[self.kind]
        self.document = model(
            kind=self.kind,
            engine=fields.pop("engine", self.engine),
            config=self.config,
            started_at=self.started_at.isoformat(timespec="seconds"),
            wall_time=self.stats["wall_time"],
            passed=self.passed,
            criteria=self.criteria,
            stats=self.stats,
            messages=[
                {
                    "category": row["Category"],
                    "subject": row["Subject"],
                    "message": row["Message"],
                    "observation": row["Observation"],
                    "timestamp": row["Timestamp"],
                }
                for row in self.__messages_stack
            ],
            **fields,
        )
        return self.document

    def __apply_colors(self, worksheet):
        """Apply colors to cells in 'Category' column based on importance"""
        thin_border = Border(
            left=Side(style="thin"),
            right=Side(style="thin"),
            top=Side(style="thin"),
            bottom=Side(style="thin"),
        )
        by_name = {v: k for k, v in IMPORTANCE_MAP.items()}

        for row_idx, category in enumerate(self.df["Category"], start=2):
            color = IMPORTANCE_COLOR_MAP.get(by_name.get(category, "debug"), "FFFFFF")
            fill_pattern = PatternFill(start_color=color, end_color=color, fill_type="solid")
            cell = worksheet[f"A{row_idx}"]
            cell.fill = fill_pattern
            cell.border = thin_border

    def __stats_df(self) -> pd.DataFrame:
        return pd.DataFrame(
            [{"Statistic": k, "Value": v} for k, v in self.stats.items()]
        )

    def __to_xlsx(self) -> bytes:
        buffer = io.BytesIO()
        with pd.ExcelWriter(buffer, engine="openpyxl") as writer:
            self.df.to_excel(writer, sheet_name="Report", index=False)
            self.__stats_df().to_excel(writer, sheet_name="Stats", index=False)
            for name, table in self.tables.items():
                table.to_excel(writer, sheet_name=name[:31], index=False)

            worksheet = writer.sheets["Report"]
            for idx, col in enumerate(self.df.columns):
                longest = self.df[col].astype(str).str.len().max() if len(self.df) else 0
                worksheet.column_dimensions[chr(65 + idx)].width = max(longest, len(col)) + 2
            self.__apply_colors(worksheet)
        return buffer.getvalue()

    def export(self, out_dir: Path | None = None, fmt: POSSIBLE_FORMATS = "json") -> list[Path]:
        """Write the document (always JSON) and its tabular companion

        `json` writes only the document; `csv` adds one file per table plus the
        messages; `xlsx` adds a workbook with coloured categories.

        Args:
            out_dir (Path, optional): Destination. Defaults to `OUTPUT_FOLDER`.
            fmt (str, optional): `json`, `csv` or `xlsx`. Defaults to "json".

        Returns:
            list[Path]: Written files
        """
        if self.document is None:
            self.finish()
        out_dir = Path(out_dir or OUTPUT_FOLDER)
        base = out_dir / self.filename

        written = [base.with_suffix(".json")]
        atomic_write(written[0], self.document.model_dump_json(indent=2))

        match fmt:
            case "json":
                pass
            case "csv":
                for name, table in {"messages": self.df, **self.tables}.items():
                    path = out_dir / f"{self.filename}.{name}.csv"
                    atomic_write(path, table.to_csv(index=False))
                    written.append(path)
            case "xlsx":
                path = base.with_suffix(".xlsx")
                atomic_write(path, self.__to_xlsx())
                written.append(path)
            case _:
                raise CampaignSpecError(f"Unknown report format: {fmt}")

        self.__update_history(out_dir)
        display(f"Report saved to {written[0]}", category="info")
        return written

    def __update_history(self, out_dir: Path):
        """Keep the summary of this run in the history file of the output folder"""
        path = out_dir / HISTORY_FILE_NAME
        history = read_history(path, keep_corrupt=True)
        history[self.filename] = {
            "kind": self.kind,
            "engine": self.document.engine,
            "passed": self.document.passed,
            "saturate": self.config.saturate,
            "started_at": self.document.started_at,
            **self.stats,
        }
        atomic_write(path, json.dumps(history, indent=4, ensure_ascii=False))
