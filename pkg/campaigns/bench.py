"""Latency benchmark of the linear layer and the accumulation-order audit."""

import pandas as pd

from core.constants import TARGET_SPEEDUP
from core.utils import make_rng
from linear.engine import LatencyModel, latency_report, nonassociativity_audit, tree_levels
from linear.tensor import Fp8Tensor

from .base import BaseCampaign

DEFAULT_BENCH_SIZES = [*range(1, 65), 256]
DEFAULT_AUDIT_SIZES = [16, 64, 256]
AUDIT_BATCH = 4
AUDIT_OUTPUTS = 4


def random_layer(seed: int, d_in: int, batch: int, d_out: int) -> tuple[Fp8Tensor, Fp8Tensor]:
    """Seeded standard-normal inputs and weights scaled by `1/sqrt(d_in)`, quantized"""
    rng = make_rng(seed, 3, d_in)
    x = Fp8Tensor.from_floats(rng.standard_normal((batch, d_in)))
    w = Fp8Tensor.from_floats(rng.standard_normal((d_out, d_in)) / d_in**0.5)
    return x, w


class LinearBenchCampaign(BaseCampaign):
    """Tree against sequential accumulation: latency laws and bit agreement"""

    name = "linear-bench"

    def __latency(self, sizes: list[int]) -> list[dict]:
        model = LatencyModel.from_circuits(self.saturate)
        self.reporter.info(
            "Depth model", f"T_mul={model.t_mul}, T_add={model.t_add} (logical depth of the units)"
        )
        rows = [latency_report(d, model).to_dict() for d in sizes]
        self.reporter.add_table("latency", pd.DataFrame(rows))

        wrong_levels = [r["d_in"] for r in rows if r["unit_tree"] - 1 != tree_levels(r["d_in"])]
        self.reporter.check(
            "tree add-levels", not wrong_levels, f"ceil(log2 D_in) for {len(rows)} sizes"
        )
        law = [r["d_in"] for r in rows if abs(r["unit_speedup"] - r["speedup_law"]) > 1e-12]
        self.reporter.check("unit speedup law", not law, "D_in / (1 + ceil(log2 D_in))")

        for row in rows:
            if row["d_in"] == 1:
                self.reporter.check("D_in=1 speedup", row["circuit_speedup"] == 1.0)
            if row["d_in"] == 256:
                self.reporter.check(
                    "D_in=256 unit steps",
                    (row["unit_tree"], row["unit_sequential"]) == (9, 256),
                    f"tree {row['unit_tree']}, sequential {row['unit_sequential']}, "
                    f"ratio {row['unit_speedup']:.1f}",
                )
                self.reporter.check(
                    f"D_in=256 circuit speedup >= {TARGET_SPEEDUP:g}",
                    row["circuit_speedup"] >= TARGET_SPEEDUP,
                    f"{row['circuit_sequential']} / {row['circuit_tree']} = {row['circuit_speedup']:.1f}",
                )
                self.reporter.info(
                    "Temporal estimate",
                    f"{row['temporal_serial']} steps on ~{row['temporal_neurons']} neurons",
                )
        return rows

    def __audit(self, sizes: list[int]) -> list[dict]:
        audits = []
        for d_in in sizes:
            self.reporter.set_subject(f"D_in={d_in}")
            x, w = random_layer(self.cfg.seed, d_in, AUDIT_BATCH, AUDIT_OUTPUTS)
            audit = nonassociativity_audit(x, w, self.engine, self.cfg, self.saturate)
            self.reporter.info(
                f"Tree and sequential agree on {audit.match_rate:.1%} of the outputs",
                f"max {audit.max_ulp} ULP, mean {audit.mean_ulp:.2f} ULP",
            )
            self.reporter.increment_stat("evaluations", audit.outputs)
            audits.append({"d_in": d_in, "match_rate": audit.match_rate, **audit.__dict__})
        self.reporter.clean_subject()
        self.reporter.add_table("audit", pd.DataFrame(audits))
        return audits

    def run(self) -> dict:
        sizes = self.options.get("d_in") or DEFAULT_BENCH_SIZES
        if self.fast_check:
            self.equivalence_proven()
        rows = self.__latency(sorted(set(sizes)))
        audit_sizes = self.options.get("audit_d_in")
        audits = self.__audit(DEFAULT_AUDIT_SIZES if audit_sizes is None else audit_sizes)
        return {"engine": self.reporter.engine, "rows": rows, "audits": audits}
