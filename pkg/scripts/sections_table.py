"""Tabulate global sections of the glued projective superlines degree by degree.

    python3 scripts/sections_table.py [--twists p11 twisted trivial] [--degree-cap 8] [--json out.json]
"""

from __future__ import annotations

import argparse
import json
from dataclasses import asdict, dataclass, field

from supersite import fixtures as fx
from supersite.superspace import global_sections


@dataclass
class SectionsConfig:
    twists: list[str] = field(default_factory=lambda: ["p11", "twisted", "trivial"])
    degree_cap: int = 8
    json: str | None = None


@dataclass
class SectionsRow:
    twist: str
    superdimension: str
    stabilized: bool
    stable_from: int | None
    dims_by_degree: list


def compute(cfg: SectionsConfig) -> list[SectionsRow]:
    rows = []
    for twist in cfg.twists:
        G = fx.glued_p1(twist)
        gs = global_sections(G.space, [e.image() for e in G.embeddings.values()], degree_cap=cfg.degree_cap)
        rows.append(SectionsRow(twist, gs.superdimension, gs.stabilized, gs.stable_from,
                                [list(d) for d in gs.dims_by_degree]))
    return rows


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--twists", nargs="+", default=SectionsConfig().twists)
    p.add_argument("--degree-cap", type=int, default=8)
    p.add_argument("--json")
    cfg = SectionsConfig(**vars(p.parse_args(argv)))
    rows = compute(cfg)
    width = max(len(r.twist) for r in rows)
    for r in rows:
        dims = " ".join(f"{e}|{o}" for e, o in r.dims_by_degree)
        flag = f"stable from {r.stable_from}" if r.stabilized else "not stabilized"
        print(f"{r.twist:<{width}}  Gamma {r.superdimension:<5} {flag:<16} by degree: {dims}")
    if cfg.json:
        with open(cfg.json, "w", encoding="utf-8") as fh:
            json.dump({"config": asdict(cfg), "rows": [asdict(r) for r in rows]}, fh, indent=2)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
