"""
Log formatting utilities for long-running toolkit steps.

Responsibilities:
- Formats per-epoch training lines (loss, validation loss, learning rate)
- Formats per-SNR sweep lines (NMSE in linear and dB with confidence half-width)
- Truncates long value lists for concise log output
- Used by neuralest training, datapipe generation and evalbench experiments
"""

import math


def format_epoch_message(entry, total_epochs=None):
    """
    Format one training history entry for logging.
    Args:
        entry (dict): History entry with 'epoch', 'lr', 'train_loss' and 'val_loss' keys.
        total_epochs (int, optional): Total planned epochs, shown as 'epoch i/N'.
    Returns:
        str: Human-readable epoch line.
    """
    epoch = entry.get("epoch")
    prefix = f"epoch {epoch}/{total_epochs}" if total_epochs else f"epoch {epoch}"
    val = entry.get("val_loss")
    val_str = "n/a" if val is None else f"{val:.6g}"
    return (
        f"{prefix}: train_loss={entry.get('train_loss', float('nan')):.6g} "
        f"val_loss={val_str} lr={entry.get('lr', float('nan')):.3g}"
    )


def format_sweep_point(estimator, snr_db, nmse, half_width):
    """
    Format one NMSE measurement of a sweep.
    Args:
        estimator (str): Estimator label.
        snr_db (float): SNR of the point in dB.
        nmse (float): Mean NMSE (linear).
        half_width (float): 95% confidence half-width (linear).
    Returns:
        str: Human-readable sweep line.
    """
    return (
        f"{estimator} @ {snr_db:g} dB: NMSE={nmse:.4g} "
        f"({to_db_string(nmse)}) ±{half_width:.2g}"
    )


def to_db_string(value):
    """
    Render a nonnegative linear quantity in dB.
    Args:
        value (float): Linear value.
    Returns:
        str: e.g. '-10.00 dB', or '-inf dB' for zero.
    """
    if value <= 0:
        return "-inf dB"
    return f"{10.0 * math.log10(value):.2f} dB"


def truncate_values(values, limit=8):
    """
    Render a sequence for logging, keeping only the first 'limit' items.
    Args:
        values (Sequence): Values to render.
        limit (int): Maximum number of items to keep.
    Returns:
        str: Truncated list representation.
    """
    values = list(values)
    shown = ", ".join(f"{v:g}" if isinstance(v, float) else str(v) for v in values[:limit])
    return f"[{shown}{', ...' if len(values) > limit else ''}]"
