"""
Parametric propagation scenarios standing in for clustered-delay-line tables.

Responsibilities:
- Defines ScenarioProfile (path count, delay spread, angular spreads, power profile, Doppler)
- Loads and saves profile files in the versioned 'scenario/1' JSON format
- Resolves the shipped profile names ('umi-nlos-like', 'uma-nlos-like') to their files
- Computes a stable profile hash recorded in dataset manifests and reports
"""

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

from chanmodel import chanmodel_params as params
from utils.binio import canonical_json_hash
from utils.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

SCENARIO_SCHEMA = "scenario/1"
PROFILE_DIR = Path(__file__).resolve().parent / "profiles"
GAIN_NORMALIZATIONS = ("none", "unit-energy")


@dataclass(frozen=True)
class AngleSpread:
    """
    Angle distribution of one array side.
    center_rad: mean cluster direction; None draws the cluster center uniformly in [0, 2*pi).
    center_jitter_rad: half-width of the uniform jitter of the cluster center per realization.
    spread_rad: half-width of the uniform per-path offset around the cluster center.
    """

    center_rad: float | None = None
    center_jitter_rad: float = 0.0
    spread_rad: float = 0.0

    @classmethod
    def from_dict(cls, data: dict) -> "AngleSpread":
        return cls(
            center_rad=data.get("center_rad"),
            center_jitter_rad=float(data.get("center_jitter_rad", 0.0)),
            spread_rad=float(data.get("spread_rad", 0.0)),
        )


@dataclass(frozen=True)
class ScenarioProfile:
    name: str
    n_paths: int
    delay_spread_s: float
    aoa_spread: AngleSpread
    aod_spread: AngleSpread
    power_profile: tuple[float, ...]
    doppler_max_hz: float = 0.0
    gain_var: float = params.DEFAULT_GAIN_VAR
    gain_normalization: str = "unit-energy"
    description: str = field(default="", compare=False)

    def __post_init__(self):
        if self.n_paths < 1:
            raise InvalidArgumentError(f"n_paths must be >= 1, got {self.n_paths}")
        if len(self.power_profile) != self.n_paths:
            raise InvalidArgumentError(
                f"power_profile has {len(self.power_profile)} entries for {self.n_paths} paths"
            )
        if abs(sum(self.power_profile) - 1.0) > 1e-9:
            raise InvalidArgumentError(
                f"power_profile must sum to 1, sums to {sum(self.power_profile)!r}"
            )
        if any(p < 0 for p in self.power_profile):
            raise InvalidArgumentError("power_profile entries must be nonnegative")
        if self.delay_spread_s <= 0:
            raise InvalidArgumentError(
                f"delay_spread_s must be > 0, got {self.delay_spread_s}"
            )
        if self.doppler_max_hz < 0:
            raise InvalidArgumentError(
                f"doppler_max_hz must be >= 0, got {self.doppler_max_hz}"
            )
        if self.gain_var <= 0:
            raise InvalidArgumentError(f"gain_var must be > 0, got {self.gain_var}")
        if self.gain_normalization not in GAIN_NORMALIZATIONS:
            raise InvalidArgumentError(
                f"gain_normalization must be one of {GAIN_NORMALIZATIONS}, "
                f"got {self.gain_normalization!r}"
            )

    def to_dict(self) -> dict:
        data = asdict(self)
        data["power_profile"] = list(self.power_profile)
        return {"schema": SCENARIO_SCHEMA, **data}

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioProfile":
        schema = data.get("schema")
        if schema != SCENARIO_SCHEMA:
            raise InvalidArgumentError(
                f"Unsupported scenario schema {schema!r}, expected {SCENARIO_SCHEMA!r}"
            )
        return cls(
            name=data["name"],
            n_paths=int(data["n_paths"]),
            delay_spread_s=float(data["delay_spread_s"]),
            aoa_spread=AngleSpread.from_dict(data.get("aoa_spread", {})),
            aod_spread=AngleSpread.from_dict(data.get("aod_spread", {})),
            power_profile=tuple(float(p) for p in data["power_profile"]),
            doppler_max_hz=float(data.get("doppler_max_hz", 0.0)),
            gain_var=float(data.get("gain_var", params.DEFAULT_GAIN_VAR)),
            gain_normalization=data.get("gain_normalization", "unit-energy"),
            description=data.get("description", ""),
        )

    def with_doppler(self, doppler_max_hz: float) -> "ScenarioProfile":
        payload = self.to_dict()
        payload["doppler_max_hz"] = doppler_max_hz
        return ScenarioProfile.from_dict(payload)


def profile_hash(profile: ScenarioProfile) -> str:
    """
    Stable short hash of a profile's statistical content (description excluded).
    Args:
        profile (ScenarioProfile): The profile.
    Returns:
        str: 16 hex characters.
    """
    payload = profile.to_dict()
    payload.pop("description", None)
    return canonical_json_hash(payload)


def available_profiles() -> list[str]:
    """
    Names of the profiles shipped with the toolkit.
    """
    return sorted(p.stem for p in PROFILE_DIR.glob("*.json"))


def load_profile(name_or_path) -> ScenarioProfile:
    """
    Load a scenario profile by shipped name or by file path.
    Args:
        name_or_path (str | Path): 'umi-nlos-like', 'uma-nlos-like', or a path to a
            'scenario/1' JSON file.
    Returns:
        ScenarioProfile: The validated profile.
    Raises:
        InvalidArgumentError: Unknown name, unreadable file, or schema mismatch.
    """
    path = Path(name_or_path)
    if not path.is_file():
        path = PROFILE_DIR / f"{name_or_path}.json"
    if not path.is_file():
        raise InvalidArgumentError(
            f"Unknown scenario '{name_or_path}'. Shipped profiles: {available_profiles()}"
        )
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise InvalidArgumentError(f"Scenario file {path} is not valid JSON: {e}") from e
    profile = ScenarioProfile.from_dict(data)
    logger.debug(f"Loaded scenario '{profile.name}' from {path}")
    return profile


def save_profile(profile: ScenarioProfile, path) -> None:
    """
    Write a profile as a 'scenario/1' JSON file.
    """
    Path(path).write_text(json.dumps(profile.to_dict(), indent=2), encoding="utf-8")
