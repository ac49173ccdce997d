"""
Side-by-side FLOP table of the classical and CNN estimators.
"""

import math
from collections.abc import Iterable

import pandas as pd

from chanmodel.system_config import SystemConfig
from classical.flops import flops_ls, flops_mmse, flops_mmse_covariance
from neuralest.netspec import NetSpec, flops_cnn
from pilotfront.front_end import flops_te
from pilotfront.pilot_config import pilot_config

COLUMNS = ["estimator", "te_flops", "core_flops", "total_flops", "order"]


def _row(name: str, te: int, core: int) -> dict:
    total = te + core
    return {
        "estimator": name,
        "te_flops": te,
        "core_flops": core,
        "total_flops": total,
        "order": f"1e{int(math.floor(math.log10(total)))}" if total > 0 else "0",
    }


def complexity_report(q: int, s: int, cfg: SystemConfig, netspecs: Iterable[NetSpec] = ()) -> pd.DataFrame:
    """
    FLOP counts of LS, ideal and non-ideal MMSE over Q subcarriers and S intervals, and of
    each network (TE of its current subcarriers plus one pass).
    Args:
        q (int): Number of adjacent subcarriers.
        s (int): Number of intervals of the joint MMSE.
        cfg (SystemConfig): Array sizes.
        netspecs (Iterable[NetSpec]): Networks to tabulate.
    Returns:
        pd.DataFrame: Columns estimator, te_flops, core_flops, total_flops, order.
    """
    full = pilot_config(cfg, 1.0)
    te = flops_te(full, q)
    rows = [
        _row("ls", 0, flops_ls(q, cfg)),
        _row(f"mmse (S={s})", te, flops_mmse(q, s, cfg)),
        _row(f"mmse-sample (S={s})", te, flops_mmse(q, s, cfg) + flops_mmse_covariance(q * s, cfg)),
    ]
    for spec in netspecs:
        rows.append(_row(f"{spec.name} (Q={spec.q})", flops_te(full, spec.q), flops_cnn(spec)))
    return pd.DataFrame(rows, columns=COLUMNS)
