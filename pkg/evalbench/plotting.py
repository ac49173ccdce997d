"""
NMSE-versus-SNR figures from saved reports.
"""

import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from evalbench.report import EvalReport  # noqa: E402
from utils.errors import InvalidArgumentError  # noqa: E402

logger = logging.getLogger(__name__)

FORMATS = (".svg", ".png")


def plot_report(report: EvalReport, out_path, title: str | None = None) -> list[str]:
    """
    One line chart of NMSE (dB) against SNR (dB) with a labeled curve per report curve.
    Args:
        report (EvalReport): Report to draw.
        out_path (str | Path): Output file; the suffix (.svg or .png) selects the format.
        title (str, optional): Figure title; default the experiment id.
    Returns:
        list[str]: Curve labels in drawing order.
    """
    out_path = Path(out_path)
    if out_path.suffix.lower() not in FORMATS:
        raise InvalidArgumentError(f"figure format must be one of {FORMATS}, got {out_path.suffix!r}")
    if not report.curves:
        raise InvalidArgumentError("report has no curves to plot")

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    labels = []
    for curve in report.curves:
        snr = [p.snr_db for p in curve.points]
        nmse_db = [p.nmse_db for p in curve.points]
        ax.plot(snr, nmse_db, marker="o", linestyle="-" if curve.matched else "--", label=curve.label)
        labels.append(curve.label)
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("NMSE (dB)")
    ax.set_title(title or report.experiment)
    ax.grid(True, alpha=0.3)
    ax.legend()
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, format=out_path.suffix.lower().lstrip("."), bbox_inches="tight")
    plt.close(fig)
    logger.info(f"    ✓ Figure with {len(labels)} curves written to {out_path}")
    return labels
