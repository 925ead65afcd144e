"""Leakage and noise robustness campaign."""

from pathlib import Path

from core.constants import DATA_FOLDER, GATE_MARGIN, NOISE_THRESHOLD, SNR_INTERPRETATION
from robustness.scan import ScanResult, ScanSpec, beta_scan, sigma_scan

from .base import BaseCampaign

DEFAULT_SCAN_SPEC = DATA_FOLDER / "default_scan.json"

REFERENCE_TARGETS = ("temporal-reference",)
"""Targets scanned for contrast only; they are not held to the spatial criteria."""


def _spatial(targets) -> list[str]:
    return [t for t in targets if t not in REFERENCE_TARGETS]


class ScanCampaign(BaseCampaign):
    """Beta and sigma scans of the requested targets, with the robustness criteria"""

    name = "scan"

    def __load_spec(self) -> ScanSpec:
        spec = ScanSpec.from_file(Path(self.options.get("spec") or DEFAULT_SCAN_SPEC))
        overrides = {
            k: self.options[k] for k in ("trials", "adder_trials") if self.options.get(k)
        }
        if overrides:
            spec = ScanSpec.from_document({**spec.model_dump(), **overrides})
            self.reporter.info("Trial counts overridden", str(overrides))
        return spec

    def __check_beta(self, result: ScanResult):
        for target in result.spec.targets:
            self.reporter.set_subject(target)
            for beta in result.spec.beta_grid:
                self.reporter.debug(f"beta={beta}: accuracy {result.accuracy(target, beta):.4f}")
        self.reporter.clean_subject()

        spatial = _spatial(result.spec.targets)
        broken = [
            f"{p.target}@{p.beta}" for p in result.points if p.target in spatial and p.accuracy < 1
        ]
        self.reporter.check(
            "leakage immunity", not broken, ", ".join(broken) or f"{len(spatial)} spatial targets exact"
        )
        for target in REFERENCE_TARGETS:
            if target in result.spec.targets:
                worst = min(p.accuracy for p in result.points if p.target == target)
                self.reporter.info(f"{target} lowest accuracy {worst:.4f}", "leaky temporal integration")

    def __check_sigma(self, result: ScanResult):
        spatial = _spatial(result.spec.targets)
        first = result.first_failure_sigma
        for target, sigma in first.items():
            self.reporter.set_subject(target)
            self.reporter.info(
                f"First failure at sigma={sigma}" if sigma is not None else "No failure on the grid"
            )
        self.reporter.clean_subject()

        early = [
            f"{t}@{first[t]}"
            for t in spatial
            if first[t] is not None and first[t] <= NOISE_THRESHOLD
        ]
        self.reporter.check(
            f"no failure up to sigma={NOISE_THRESHOLD}", not early, ", ".join(early) or SNR_INTERPRETATION
        )

        floor = result.clip_floor
        if floor is not None:
            self.reporter.info(
                f"First failures set by the noise clip (+-{result.spec.noise_clip} sigma)",
                f"no neuron crosses the {GATE_MARGIN} margin below sigma={floor:.4f}, "
                "so the first failing grid level does not rank the gates",
            )

        gates = [t for t in ("AND", "OR", "NOT") if t in spatial]
        failing = sorted(
            {p.sigma for p in result.points if p.target in ("XOR", *gates) and p.accuracy < 1}
        )
        if "XOR" in spatial and gates and failing:
            sigma = failing[0]
            xor = result.accuracy("XOR", sigma)
            worse = [t for t in gates if result.accuracy(t, sigma) < xor]
            self.reporter.check(
                "XOR least accurate",
                not worse,
                f"sigma={sigma}: XOR {xor:.4f}, "
                + ", ".join(f"{t} {result.accuracy(t, sigma):.4f}" for t in gates),
            )

    def run(self) -> dict:
        spec = self.__load_spec()
        kinds = self.options.get("kinds") or ("beta", "sigma")
        if self.fast_check:
            self.reporter.info("Scans always run the spiking circuits", "--fast-check ignored")
        self.reporter.info(f"Scan '{spec.name}'", f"targets {spec.targets}, seed {spec.seed}")

        results: list[ScanResult] = []
        if "beta" in kinds:
            results.append(beta_scan(spec))
            self.__check_beta(results[-1])
        if "sigma" in kinds:
            results.append(sigma_scan(spec))
            self.__check_sigma(results[-1])

        points = []
        for result in results:
            frame = result.to_frame()
            self.reporter.add_table(result.kind, frame)
            points.extend(frame.to_dict(orient="records"))
            for p in result.points:
                self.reporter.increment_stat("evaluations", p.trials)
                self.reporter.increment_stat("mismatches", p.trials - p.passes)

        sigma = next((r for r in results if r.kind == "sigma"), None)
        return {
            "engine": "spiking",
            "name": spec.name,
            "snr_interpretation": SNR_INTERPRETATION,
            "points": points,
            "first_failure_sigma": sigma.first_failure_sigma if sigma else {},
            "noise_clip": spec.noise_clip,
            "clip_floor_sigma": sigma.clip_floor if sigma else None,
            "series": {r.kind: r.series() for r in results},
        }

