"""E2 page for bundles over a complex with the cohomology of J8.

Builds H*(Sigma^2 J) ⊗ H*(DX) from the J8 algebra, splits off free A(1)
summands, and prints the Ext chart of each piece together with the
s = t diagonal that counts towers.
"""

from __future__ import annotations

import argparse

from sqalg import gradmod as G
from sqalg.chart import FORMATS, render_chart
from sqalg.ext import ext_chart
from sqalg.models import decomposition_module


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--smax", type=int, default=12)
    ap.add_argument("--format", choices=FORMATS, default="ascii")
    args = ap.parse_args()
    t_max = args.smax + 6 + 6  # one A(1) top degree of margin past the joker tower

    M = decomposition_module()
    split = G.split_free_summands(M)
    print(f"dim {M.dim}; free summands at {sorted(split.shifts)}; remainder dim {split.remainder.dim}")
    full = ext_chart(M, args.smax, t_max)
    rem = ext_chart(split.remainder, args.smax, t_max)
    higher = lambda c: {k: v for k, v in c.dims.items() if k[0] > 0}
    assert higher(full) == higher(rem), "free summands should not contribute above s = 0"
    print(render_chart(full, args.format))
    diag = full.diagonal(0)
    print("E2^{s,s}:", " ".join(map(str, diag)))
    print(f"towers on the diagonal: {diag[-1]}")


if __name__ == "__main__":
    main()
