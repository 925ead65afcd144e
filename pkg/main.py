import argparse
import sys

from campaigns import (
    CodeTableCampaign,
    ExportNetlistCampaign,
    LinearBenchCampaign,
    MlpDemoCampaign,
    ScanCampaign,
    SchemasCampaign,
    VerifyAddCampaign,
    VerifyMulCampaign,
)
from core.abstract import Campaign, SpikeFloatError
from core.constants import SETTINGS_FILE
from core.utils import Printter, get_settings, merge_overrides

display = Printter("SPIKEFLOAT")

campaigns: dict[str, type[Campaign]] = {
    "verify-mul": VerifyMulCampaign,
    "verify-add": VerifyAddCampaign,
    "scan": ScanCampaign,
    "linear-bench": LinearBenchCampaign,
    "mlp-demo": MlpDemoCampaign,
    "export-netlist": ExportNetlistCampaign,
    "code-table": CodeTableCampaign,
    "schemas": SchemasCampaign,
}

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps a flag given before the subcommand from being reset by the subparser
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--settings", help="settings file (toml)")
    common.add_argument("--seed", type=int)
    common.add_argument("--beta", type=float, help="membrane retention in (0, 1]")
    common.add_argument("--sigma", type=float, help="current noise standard deviation")
    common.add_argument("--saturate", choices=["on", "off"], help="saturating overflow")
    common.add_argument(
        "--fast-check",
        action="store_true",
        help="use the oracle tables where the spiking units are already verified",
    )
    common.add_argument("--out", help="output folder")
    common.add_argument("--format", choices=["json", "csv", "xlsx"])

    parser = argparse.ArgumentParser(
        prog="spikefloat", description="Spiking FP8 arithmetic campaigns", parents=[common]
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("verify-mul", parents=[common], help="exhaustive multiplier sweep")
    p.add_argument(
        "--no-sticky-extra",
        dest="sticky_extra",
        action="store_false",
        help="disable the sticky-extra correction (debug)",
    )

    p = sub.add_parser("verify-add", parents=[common], help="corner suite, random and exhaustive adder sweep")
    p.add_argument("--random-trials", type=int)

    p = sub.add_parser("scan", parents=[common], help="leakage and noise robustness scans")
    p.add_argument("spec", nargs="?", help="campaign spec (json or toml)")
    p.add_argument("--kinds", nargs="+", choices=["beta", "sigma"])
    p.add_argument("--trials", type=int)
    p.add_argument("--adder-trials", type=int)

    p = sub.add_parser("linear-bench", parents=[common], help="tree against sequential latency")
    p.add_argument("--d-in", dest="d_in", type=int, nargs="+")
    p.add_argument("--audit-d-in", dest="audit_d_in", type=int, nargs="*")

    p = sub.add_parser("mlp-demo", parents=[common], help="forward-only MLP demo")
    p.add_argument("--weights")
    p.add_argument("--images", help="IDX image file (synthetic samples when absent)")
    p.add_argument("--samples", type=int)

    p = sub.add_parser("export-netlist", parents=[common], help="netlist of a gate or unit")
    p.add_argument("unit")

    sub.add_parser("code-table", parents=[common], help="table of the 256 FP8 codes")
    sub.add_parser("schemas", parents=[common], help="JSON Schema of the reports")
    return parser


def settings_from_args(args: argparse.Namespace) -> dict:
    """Settings file merged with the command line flags"""
    flags = vars(args)
    options = {
        k: v
        for k, v in flags.items()
        if k not in {"command", "settings", "seed", "beta", "sigma", "saturate", "out", "format"}
    }
    saturate = flags.get("saturate")
    return merge_overrides(
        get_settings(flags.get("settings", SETTINGS_FILE)),
        {
            "simulation": {k: flags.get(k) for k in ("seed", "beta", "sigma")},
            "fp8": {"saturate": None if saturate is None else saturate == "on"},
            "output": {"dir": flags.get("out"), "format": flags.get("format")},
            "campaign": options,
        },
    )


def choose_command() -> str:
    for i, opt in enumerate(campaigns.keys(), 1):
        print(f"{i} - {opt}")
    choice = int(input("Which campaign do you want to run? "))
    return list(campaigns.keys())[choice - 1]


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        try:
            args = parser.parse_args([choose_command(), *(sys.argv[1:] if argv is None else argv)])
        except (ValueError, IndexError, EOFError):
            parser.print_help()
            return EXIT_USAGE

    try:
        settings = settings_from_args(args)
        report = campaigns[args.command](settings).start()
    except SpikeFloatError as e:
        display(str(e), category="error")
        return EXIT_USAGE
    return EXIT_OK if report.passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
