"""
Machine-readable experiment reports ('report/1' JSON).

Responsibilities:
- CurvePoint / Curve / EvalReport dataclasses with validation
- Lossless JSON conversion with sorted keys, so equal reports give equal files
"""

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

from evalbench import evalbench_params as params
from utils.errors import DataIntegrityError, InvalidArgumentError

logger = logging.getLogger(__name__)

REPORT_SCHEMA = "report/1"


@dataclass(frozen=True)
class CurvePoint:
    snr_db: float
    nmse: float
    nmse_db: float
    half_width: float
    n: int
    realization_hash: str

    def __post_init__(self):
        if not (self.nmse >= 0):
            raise InvalidArgumentError(f"NMSE must be nonnegative, got {self.nmse}")
        if self.half_width is None:
            raise InvalidArgumentError("every point needs a confidence half-width")


@dataclass
class Curve:
    estimator: str
    profile: str
    profile_hash: str
    points: list[CurvePoint] = field(default_factory=list)
    matched: bool = True
    interval: int | None = None

    @property
    def label(self) -> str:
        label = self.estimator if self.interval is None else f"{self.estimator} d={self.interval}"
        return label if self.matched else f"{label} on {self.profile}"

    def nmse_at(self, snr_db: float) -> float:
        for point in self.points:
            if point.snr_db == snr_db:
                return point.nmse
        raise KeyError(f"{self.label} has no point at {snr_db} dB")


@dataclass
class EvalReport:
    experiment: str
    seed: int
    n_mc: int
    estimators: list[dict] = field(default_factory=list)
    curves: list[Curve] = field(default_factory=list)
    flops: dict = field(default_factory=dict)
    overhead: dict | None = None
    scenario: dict = field(default_factory=dict)
    settings: dict = field(default_factory=dict)
    version: str = params.TOOLKIT_VERSION

    def curve(self, estimator: str, profile_hash: str | None = None, interval: int | None = None) -> Curve:
        for curve in self.curves:
            if curve.estimator != estimator or curve.interval != interval:
                continue
            if profile_hash is None or curve.profile_hash == profile_hash:
                return curve
        raise KeyError(f"no curve for {estimator} (profile {profile_hash}, interval {interval})")

    def to_dict(self) -> dict:
        return {"schema": REPORT_SCHEMA, **asdict(self)}

    @classmethod
    def from_dict(cls, data: dict) -> "EvalReport":
        if data.get("schema") != REPORT_SCHEMA:
            raise InvalidArgumentError(
                f"Unsupported report schema {data.get('schema')!r}, expected {REPORT_SCHEMA!r}"
            )
        curves = [
            Curve(**{**c, "points": [CurvePoint(**p) for p in c["points"]]}) for c in data["curves"]
        ]
        fields = {k: v for k, v in data.items() if k in cls.__dataclass_fields__ and k != "curves"}
        return cls(curves=curves, **fields)


def save_report(report: EvalReport, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(report.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")
    logger.info(f"    ✓ Report written to {path}")
    return path


def load_report(path) -> EvalReport:
    """
    Raises:
        DataIntegrityError: Unreadable file or wrong schema.
    """
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
        return EvalReport.from_dict(data)
    except (OSError, json.JSONDecodeError, InvalidArgumentError, KeyError, TypeError) as e:
        raise DataIntegrityError(f"Cannot read report {path}: {e}") from e
