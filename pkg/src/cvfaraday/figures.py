"""Datasets behind the entanglement-region and cluster-criteria plots."""

from __future__ import annotations

from .protocols import Table, grid_points, run_cluster, run_epr, run_epr_enhanced

PAIR_KEY = "ppt(A1|A2)"


def _pair_columns(result) -> list[float]:
    r = result.reports
    duan = r["duan_lambda1"]
    return [duan, duan < 2, r[PAIR_KEY + ".min_eig"], r[PAIR_KEY + ".entangled"]]


def entanglement_regions(n_step: float = 0.25, kappa_step: float = 0.1) -> Table:
    """Duan sum and PPT verdict of both two-sample setups over ``n1, n2 in [1, 3]``, ``kappa in [0, 2]``."""
    columns = ["n1", "n2", "kappa"]
    for prefix in ("epr", "enhanced"):
        columns += [f"{prefix}_duan", f"{prefix}_duan_violated", f"{prefix}_ppt_min_eig", f"{prefix}_ppt_entangled"]
    table = Table(columns, [])
    occupations = grid_points(1.0, 3.0, n_step)
    for n1 in occupations:
        for n2 in occupations:
            for kappa in grid_points(0.0, 2.0, kappa_step):
                row = [n1, n2, kappa]
                row += _pair_columns(run_epr(n1, n2, kappa))
                row += _pair_columns(run_epr_enhanced(n1, n2, kappa))
                table.rows.append(row)
    return table


def cluster_criteria(kappa_step: float = 0.01, kappa_max: float = 0.8) -> Table:
    """Cluster nullifier variances and the three criteria against the coupling."""
    names = ["var(p:A1-x:A2)", "var(p:A2-x:A1-x:A3)", "delta1", "delta2", "delta3"]
    flags = ["delta1.entangled", "delta2.entangled", "delta3.entangled"]
    table = Table(["kappa", *names, *flags], [])
    for kappa in grid_points(0.0, kappa_max, kappa_step):
        r = run_cluster(kappa).reports
        table.rows.append([kappa, *(r[n] for n in names), *(r[f] for f in flags)])
    return table


FIGURES = {"fig3": entanglement_regions, "fig5": cluster_criteria}
