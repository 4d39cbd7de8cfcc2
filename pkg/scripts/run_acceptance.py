"""Run the acceptance suite and print one PASS/FAIL line per criterion.

    python3 scripts/run_acceptance.py [--only 2 4] [--junit out.xml]
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]


@dataclass
class AcceptanceConfig:
    only: list[int] = field(default_factory=list)
    junit: str | None = None
    verbose: bool = False

    def pytest_args(self) -> list[str]:
        args = [str(ROOT / "tests" / "test_acceptance.py"), "-p", "no:cacheprovider",
                "-v" if self.verbose else "-q"]
        if self.only:
            args += ["-k", " or ".join(f"criterion_{n}_" for n in self.only)]
        if self.junit:
            args += ["--junitxml", self.junit]
        return args


def parse_args(argv=None) -> AcceptanceConfig:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--only", type=int, nargs="+", default=[], metavar="N", help="criterion numbers to run")
    p.add_argument("--junit", help="write a JUnit XML report")
    p.add_argument("-v", "--verbose", action="store_true")
    return AcceptanceConfig(**vars(p.parse_args(argv)))


def main(argv=None) -> int:
    cfg = parse_args(argv)
    return int(pytest.main(cfg.pytest_args()))


if __name__ == "__main__":
    sys.exit(main())
