from dataclasses import dataclass
from pathlib import Path

from core.abstract import DataSourceError
from core.constants import DATA_FOLDER
from core.utils import load_document
from fp8.code import Fp8Code
from fp8.oracle import oracle_add

CORNER_SUITE_FILE = DATA_FOLDER / "adder_corner_cases.json"


@dataclass(frozen=True)
class CornerCase:
    a: int
    b: int
    category: str
    note: str = ""

    def expected(self, saturate: bool = True) -> Fp8Code:
        return oracle_add(self.a, self.b, saturate)


def load_corner_suite(path: Path = CORNER_SUITE_FILE) -> list[CornerCase]:
    """Load the versioned adder corner suite

    Raises:
        DataSourceError: Missing file or malformed case

    Returns:
        list[CornerCase]: Cases in file order
    """
    try:
        document = load_document(path)
    except Exception as e:
        raise DataSourceError(f"Can not read the corner suite: {e}") from e

    cases = []
    for i, item in enumerate(document.get("cases", [])):
        try:
            a, b = (int(str(item[k]), 16) for k in ("a", "b"))
        except (KeyError, ValueError) as e:
            raise DataSourceError(f"Corner case #{i} is malformed: {item}") from e
        if not (0 <= a <= 0xFF and 0 <= b <= 0xFF):
            raise DataSourceError(f"Corner case #{i} is out of range: {item}")
        cases.append(CornerCase(a, b, item.get("category", "misc"), item.get("note", "")))

    if not cases:
        raise DataSourceError(f"The corner suite {path} is empty")
    return cases
