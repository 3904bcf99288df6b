"""Write the shipped example files (algebras and modules) to src/sqalg/data."""

from __future__ import annotations

import argparse
from pathlib import Path

from sqalg import gradmod as G
from sqalg import models, spda

ALGEBRAS = {
    "j8": models.model_j8,
    "rp2": lambda: models.model_rp(2),
    "bso3": models.model_bso3,
    "kz3": models.model_kz3,
}

MODULES = {
    "joker": G.joker,
    "a1": lambda: G.free_module("A(1)", [0]),
    "f2": G.f2,
    "thom": models.model_thom,
    "thom_a1": models.model_thom_diagram,
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parents[1] / "src" / "sqalg" / "data")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, build in ALGEBRAS.items():
        (args.out / f"{name}.json").write_text(spda.to_json(build()), encoding="utf-8")
    for name, build in MODULES.items():
        (args.out / f"{name}.module.json").write_text(G.to_json(build()), encoding="utf-8")
    print(f"wrote {len(ALGEBRAS) + len(MODULES)} files to {args.out}")


if __name__ == "__main__":
    main()
