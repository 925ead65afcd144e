"""Exhaustive bit-exactness campaigns of the spiking multiplier and adder."""

import numpy as np
import pandas as pd

from arithmetic.corner_cases import load_corner_suite
from arithmetic.units import run_unit, unit_circuit
from core.constants import (
    CLASS_ROWS,
    QUOTED_ADDER_NEURONS,
    QUOTED_MULTIPLIER_DEPTH,
    QUOTED_MULTIPLIER_NEURONS,
    RESOURCE_TOLERANCE,
    SPARSITY_BAND,
)
from core.utils import make_rng
from fp8.code import classify
from fp8.oracle import oracle_table
from spiking.circuit import Circuit, circuit_stats

from .base import BaseCampaign

MAX_LISTED_FAILURES = 256
"""Counterexamples kept in the report document (the table keeps them all)."""

DEFAULT_RANDOM_TRIALS = 100

FINITE_BYTES = np.array(
    [b for b in range(256) if (b & 0x7F) != 0x7F], dtype=np.uint8
)
"""The 254 finite codes (both zeros included)."""

_CLASSES = np.array([classify(b) for b in range(256)])


def class_rows(a: np.ndarray, b: np.ndarray, symbol: str) -> np.ndarray:
    """Row label of every pair: zeros get their own rows, else the operand classes"""
    ca, cb = _CLASSES[a], _CLASSES[b]
    labels = np.char.add(np.char.add(np.char.capitalize(ca), f" {symbol} "), np.char.capitalize(cb))
    labels = np.where(cb == "zero", f"Finite {symbol} Zero", labels)
    return np.where(ca == "zero", f"Zero {symbol} Finite", labels)


def exhaustive_pairs() -> tuple[np.ndarray, np.ndarray]:
    """Every finite x finite pair (254 x 254)"""
    a, b = np.meshgrid(FINITE_BYTES, FINITE_BYTES, indexing="ij")
    return a.ravel(), b.ravel()


class SweepCampaign(BaseCampaign):
    """Runs a two-operand unit against the oracle and fills the sweep report"""

    unit = "mul"
    symbol = "x"
    quoted_neurons = QUOTED_MULTIPLIER_NEURONS
    quoted_depth: int | None = None

    @property
    def circuit(self) -> Circuit:
        return unit_circuit(self.unit, self.saturate, self.options.get("sticky_extra", True))

    def _check_pairs(
        self, a: np.ndarray, b: np.ndarray, stream: tuple[int, ...], progress: bool = False
    ) -> tuple[np.ndarray, np.ndarray]:
        """Evaluate pairs, update the stats and return (got, mismatch mask)"""
        circuit = self.circuit
        run = run_unit(circuit, a, b, self.cfg, stream, progress)
        expected = oracle_table(self.unit, self.saturate)[a, b]
        wrong = run.results != expected

        self.reporter.increment_stat("evaluations", int(a.size))
        self.reporter.increment_stat("mismatches", int(wrong.sum()))
        self.reporter.increment_stat("spikes", int(run.spike_counts.sum()))
        self.reporter.increment_stat("neuron_updates", int(a.size) * run.neurons)
        return run.results, wrong

    def _failures(self, a, b, got, wrong, rows) -> list[dict]:
        expected = oracle_table(self.unit, self.saturate)
        failures = [
            {
                "a": f"0x{int(x):02X}",
                "b": f"0x{int(y):02X}",
                "got": f"0x{int(g):02X}",
                "expected": f"0x{int(expected[x, y]):02X}",
                "row": str(r),
            }
            for x, y, g, r in zip(a[wrong], b[wrong], got[wrong], rows[wrong])
        ]
        if failures:
            self.reporter.add_table("failures", pd.DataFrame(failures))
            first = failures[0]
            self.reporter.error(
                f"{len(failures)} mismatches",
                f"eg. {first['a']} {self.symbol} {first['b']} gave {first['got']}, expected {first['expected']}",
            )
        return failures[:MAX_LISTED_FAILURES]

    def _sweep(self) -> tuple[list[dict], list[dict]]:
        """Exhaustive sweep, returns (class rows, failures)"""
        a, b = exhaustive_pairs()
        self.reporter.set_subject("exhaustive")
        self.display(f"Sweeping {a.size} pairs through {self.circuit.name}", category="info")
        got, wrong = self._check_pairs(a, b, (0,), progress=True)

        rows = class_rows(a, b, self.symbol)
        order = [r.replace(" x ", f" {self.symbol} ") for r in CLASS_ROWS]
        table = (
            pd.DataFrame({"row": rows, "ok": ~wrong})
            .groupby("row")["ok"]
            .agg(total="size", passed="sum")
            .reindex(order, fill_value=0)
            .reset_index()
        )
        table["pass_rate"] = np.where(table["total"] > 0, table["passed"] / table["total"].clip(lower=1), 1.0)
        total = pd.DataFrame(
            [{"row": "Total", "total": int(a.size), "passed": int((~wrong).sum()),
              "pass_rate": float((~wrong).mean())}]
        )
        table = pd.concat([table, total], ignore_index=True)
        self.reporter.add_table("classes", table)

        for row in table.itertuples():
            self.reporter.set_subject(row.row)
            self.reporter.debug(f"{row.passed}/{row.total} pairs pass", f"pass rate {row.pass_rate:.4%}")
        self.reporter.clean_subject()

        classes = [
            {"row": r.row, "total": int(r.total), "passed": int(r.passed), "pass_rate": float(r.pass_rate)}
            for r in table.itertuples()
        ]
        return classes, self._failures(a, b, got, wrong, rows)

    def _resources(self) -> dict:
        stats = circuit_stats(self.circuit)
        deviation = abs(stats["neurons"] - self.quoted_neurons) / self.quoted_neurons
        resources = {
            **stats,
            "quoted_neurons": self.quoted_neurons,
            "within_tolerance": deviation <= RESOURCE_TOLERANCE,
            "quoted_depth": self.quoted_depth,
        }
        self.reporter.check(
            "neuron count",
            resources["within_tolerance"],
            f"{stats['neurons']} neurons, quoted {self.quoted_neurons} "
            f"(+-{RESOURCE_TOLERANCE:.0%}), depth {stats['depth']}",
        )
        if self.quoted_depth is not None and stats["depth"] > self.quoted_depth:
            self.reporter.warn(
                f"Depth {stats['depth']} above the quoted {self.quoted_depth} levels",
                "ripple-carry exponent adder and array rows",
            )
        return resources

    def _sparsity(self) -> tuple[float, bool]:
        sparsity = float(self.reporter.stats["mean_sparsity"])
        low, high = SPARSITY_BAND
        within = low <= sparsity <= high
        message = f"Mean spike sparsity {sparsity:.3f}"
        if within:
            self.reporter.info(message, f"band {SPARSITY_BAND}")
        else:
            self.reporter.warn(message, f"outside the band {SPARSITY_BAND}")
        return sparsity, within

    def _fields(self, classes, failures, suites) -> dict:
        if self.fast_check:
            self.reporter.info("Verification always runs the spiking units", "--fast-check ignored")
        sparsity, within = self._sparsity()
        self.reporter.check(
            "bit-exact",
            self.reporter.stats["mismatches"] == 0,
            f"{self.reporter.stats['evaluations']} evaluations, "
            f"{self.reporter.stats['mismatches']} mismatches",
        )
        return {
            "engine": "spiking",
            "classes": classes,
            "failures": failures,
            "mean_sparsity": sparsity,
            "sparsity_within_band": within,
            "resources": self._resources(),
            "suites": suites,
            "sticky_extra": bool(self.options.get("sticky_extra", True)),
        }


class VerifyMulCampaign(SweepCampaign):
    """Every finite x finite pair through the spiking multiplier"""

    name = "verify-mul"
    unit = "mul"
    symbol = "x"
    quoted_neurons = QUOTED_MULTIPLIER_NEURONS
    quoted_depth = QUOTED_MULTIPLIER_DEPTH

    def run(self) -> dict:
        if not self.options.get("sticky_extra", True):
            self.reporter.warn("Sticky-extra correction disabled", "debug configuration")
        classes, failures = self._sweep()
        return self._fields(classes, failures, [])


class VerifyAddCampaign(SweepCampaign):
    """Corner suite, seeded random pairs and every finite pair through the spatial adder"""

    name = "verify-add"
    unit = "add"
    symbol = "+"
    quoted_neurons = QUOTED_ADDER_NEURONS

    def __corner_suite(self) -> dict:
        self.reporter.set_subject("corner suite")
        cases = load_corner_suite()
        a = np.array([c.a for c in cases], dtype=np.uint8)
        b = np.array([c.b for c in cases], dtype=np.uint8)
        got, wrong = self._check_pairs(a, b, (1,))

        categories: dict[str, list[int]] = {}
        for case, value, ok in zip(cases, got, ~wrong):
            counts = categories.setdefault(case.category, [0, 0])
            counts[0] += 1
            counts[1] += int(ok)
            if not ok:
                self.reporter.error(
                    f"0x{case.a:02X} + 0x{case.b:02X} gave 0x{int(value):02X}",
                    f"expected {case.expected(self.saturate)} ({case.note})",
                )
        for category, (total, passed) in categories.items():
            self.reporter.debug(f"{category}: {passed}/{total}")

        cancellation = [i for i, c in enumerate(cases) if c.category == "cancellation"]
        self.reporter.check(
            "cancellation gives +0",
            all(int(got[i]) == 0 for i in cancellation),
            f"{len(cancellation)} cancellation cases",
        )
        self.reporter.clean_subject()
        return {"name": "corner suite", "total": len(cases), "passed": int((~wrong).sum())}

    def __random_trials(self) -> dict:
        self.reporter.set_subject("random trials")
        trials = int(self.options.get("random_trials", DEFAULT_RANDOM_TRIALS))
        rng = make_rng(self.cfg.seed, 1, 2)
        a = rng.choice(FINITE_BYTES, size=trials)
        b = rng.choice(FINITE_BYTES, size=trials)
        _, wrong = self._check_pairs(a, b, (2,))
        self.reporter.debug(f"{trials - int(wrong.sum())}/{trials} random pairs pass", f"seed {self.cfg.seed}")
        self.reporter.clean_subject()
        return {"name": "random trials", "total": trials, "passed": int((~wrong).sum())}

    def run(self) -> dict:
        suites = [self.__corner_suite(), self.__random_trials()]
        classes, failures = self._sweep()
        return self._fields(classes, failures, suites)
