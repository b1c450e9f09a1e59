import os
import sys
import argparse
import importlib
import logging
from pathlib import Path

from dotenv import load_dotenv

from optlink.errors import LinkError
from optlink.report import FORMATS, PRECISIONS
from optlink.signaling import REGISTRY_PATH, RequiredFluxRegistry

# === Load environment ===
ROOT = Path(__file__).parent
load_dotenv(ROOT / ".env")

LOG_LEVEL = os.getenv("OPTLINK_LOG_LEVEL", "WARNING").upper()
# registry override; a --registry flag or a scenario's registry key still win
DEFAULT_REGISTRY = Path(os.getenv("OPTLINK_REGISTRY") or REGISTRY_PATH)

logging.basicConfig(level=LOG_LEVEL, format="%(levelname)s %(name)s: %(message)s")
log = logging.getLogger("optlink")


# === CLI class ===
class OptlinkCLI:
    """Argument parsing plus the command groups found in ``optlink/commands``."""

    def __init__(self):
        self.parser = argparse.ArgumentParser(
            prog="optlink",
            description="Pointing loss, outage margins, gain design and link budgets for deep-space optical links.",
        )
        self.subparsers = self.parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

        # options every subcommand accepts, after the subcommand name
        self.common = argparse.ArgumentParser(add_help=False)
        self.common.add_argument("--format", choices=FORMATS, default=None, help="output format (default text)")
        self.common.add_argument("--precision", choices=PRECISIONS, default=None,
                                 help="paper: rounded like the published tables; full: every digit")
        self.common.add_argument("--registry", type=Path, default=None, help="required-flux registry file")
        self.common.add_argument("--log-level", type=str.upper, default=None,
                                 choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="logging level")

        self.groups: list = []
        self._registries: dict[Path, RequiredFluxRegistry] = {}

    def add_command(self, name: str, handler, **kwargs) -> argparse.ArgumentParser:
        sub = self.subparsers.add_parser(name, parents=[self.common], **kwargs)
        sub.set_defaults(handler=handler)
        return sub

    def add_group(self, group) -> None:
        self.groups.append(group)

    def load_extensions(self) -> None:
        commands_dir = ROOT / "optlink" / "commands"
        if commands_dir.exists():
            for f in sorted(commands_dir.iterdir()):
                if f.suffix == ".py" and not f.name.startswith("_"):
                    module = importlib.import_module(f"optlink.commands.{f.stem}")
                    module.setup(self)
                    log.debug("🔌 Commands loaded: optlink.commands.%s", f.stem)

    # === Shared option resolution ===
    def registry(self, args, scenario_file=None) -> RequiredFluxRegistry:
        path = args.registry
        if path is None and scenario_file is not None:
            path = scenario_file.registry_path
        path = Path(path or DEFAULT_REGISTRY)
        if path not in self._registries:
            self._registries[path] = RequiredFluxRegistry.load(path)
        return self._registries[path]

    @staticmethod
    def output_options(args, scenario_file=None) -> tuple[str, str]:
        fmt = args.format or (scenario_file.output.format if scenario_file else "text")
        precision = args.precision or (scenario_file.output.precision if scenario_file else "paper")
        return fmt, precision

    def run(self, argv=None) -> int:
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as e:
            # argparse usage errors exit 2, --help exits 0
            return int(e.code or 0)
        if args.log_level:
            logging.getLogger().setLevel(args.log_level)
        try:
            out = args.handler(args)
        except LinkError as e:
            print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
            return e.exit_code
        sys.stdout.write(out)
        return 0


def build_cli() -> OptlinkCLI:
    cli = OptlinkCLI()
    cli.load_extensions()
    return cli


def main(argv=None) -> int:
    return build_cli().run(argv)


if __name__ == "__main__":
    sys.exit(main())
