"""Smoke test for the tilinglab_py extension.

Build first:  maturin develop -m crates/py/Cargo.toml --release
"""

import json

import tilinglab_py as tl


def main() -> None:
    k3 = tl.Pattern.clique(3)
    assert k3.h == 3 and k3.density() == (3, 2)

    tri = tl.Graph.multipartite([3, 4, 5])
    assert tri.min_degree() == 7 and tri.max_clique() == 3
    assert tl.find_factor_exact(tri, k3) is None

    k9 = tl.Graph.complete(9)
    tiling = tl.find_factor_exact(k9, k3)
    assert tiling is not None and len(tiling) == 3
    tl.verify_factor(k9, k3, tiling)
    try:
        tl.verify_factor(k9, k3, [[0, 1, 2], [2, 3, 4], [5, 6, 7]])
    except ValueError as e:
        print("rejected:", e)
    else:
        raise AssertionError("overlapping tiling accepted")

    g = tl.Graph.parse(tl.Graph.gnp(40, 0.5, 3).to_edge_list())
    assert g == tl.Graph.gnp(40, 0.5, 3)
    print("alpha_2 of G(40, 0.5):", g.alpha_ell(2))
    print("alpha* estimate:", tl.alpha_star(g, k3, trials=200, seed=1))
    tiles, left = tl.greedy_max_tiling(g, k3, seed=0)
    assert 3 * len(tiles) + len(left) == 40

    big = tl.Graph.gnp(120, 0.7, 9)
    report = json.loads(tl.find_factor_absorbing(big, k3, seed=1))
    assert report["tiling"] is not None, report["stages"]
    print("pipeline path:", report["path"], "copies:", len(report["tiling"]))
    print(tl.verify_certificate(big, json.dumps(report["tiling"]), k3))
    print("ok")


if __name__ == "__main__":
    main()
