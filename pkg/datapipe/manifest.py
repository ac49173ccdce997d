"""
Dataset manifest: everything needed to regenerate a dataset bit for bit.

Responsibilities:
- DatasetManifest dataclass with validation and 'dataset/1' JSON conversion
- Derived shapes (input and output feature maps) per estimator family
"""

from dataclasses import asdict, dataclass, replace

from chanmodel.scenario import ScenarioProfile, profile_hash
from chanmodel.system_config import SystemConfig
from neuralest import neuralest_params as nparams
from utils.binio import canonical_json_hash
from utils.errors import InvalidArgumentError

DATASET_SCHEMA = "dataset/1"
KINDS = ("sf", "sft", "spr")
SNR_MODES = ("fixed", "mixed")


@dataclass(frozen=True)
class DatasetManifest:
    """
    depth: 1 for sf, S for sft, D (CEU length) for spr.
    interval_index: for one SPR sub-dataset, the CEU position d whose inputs it holds.
    """

    scenario: str
    profile_hash: str
    cfg: SystemConfig
    kind: str
    q: int
    count: int
    seed: int
    snr_db: float | tuple[float, ...] = 10.0
    snr_mode: str = "fixed"
    depth: int = 1
    interval_index: int | None = None
    scale_c: float = nparams.SCALE_C
    rho: float | None = None
    temporal_model: str = "gauss-markov"
    reduced_m_tx: int = 16
    reduced_m_rx: int = 4
    split: str | None = None
    parent: str | None = None
    rejected: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"kind must be one of {KINDS}, got {self.kind!r}")
        # split parts may be empty, generated datasets may not
        if self.count < (0 if self.split else 1):
            raise InvalidArgumentError(f"count must be > 0, got {self.count}")
        if self.q < 1 or self.q > self.cfg.n_subcarriers:
            raise InvalidArgumentError(f"q must be in [1, {self.cfg.n_subcarriers}], got {self.q}")
        if not (self.scale_c > 0):
            raise InvalidArgumentError(f"scale_c must be > 0, got {self.scale_c}")
        if self.snr_mode not in SNR_MODES:
            raise InvalidArgumentError(f"snr_mode must be one of {SNR_MODES}, got {self.snr_mode!r}")
        if self.snr_mode == "mixed" and not isinstance(self.snr_db, tuple):
            raise InvalidArgumentError("mixed SNR mode needs a list of SNR values")
        if self.snr_mode == "fixed" and isinstance(self.snr_db, tuple):
            raise InvalidArgumentError("fixed SNR mode needs a single SNR value")
        if self.depth < 1 or (self.kind == "sf" and self.depth != 1):
            raise InvalidArgumentError(f"invalid depth {self.depth} for kind {self.kind}")
        if self.interval_index is not None and not (1 <= self.interval_index <= self.depth):
            raise InvalidArgumentError(
                f"interval_index must be in [1, {self.depth}], got {self.interval_index}"
            )

    @property
    def input_matrices(self) -> int:
        if self.kind == "sf":
            return self.q
        if self.kind == "sft":
            return self.q * self.depth
        if self.interval_index is None:
            raise InvalidArgumentError("an SPR manifest needs interval_index to define its inputs")
        return self.q * self.interval_index

    @property
    def input_maps(self) -> int:
        return 2 * self.input_matrices

    @property
    def output_maps(self) -> int:
        return 2 * self.q

    @property
    def net_kind(self) -> str:
        """Network family these samples train: 'sf', 'sft' or 'spr-<d>'."""
        return f"spr-{self.interval_index}" if self.kind == "spr" else self.kind

    def with_updates(self, **changes) -> "DatasetManifest":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["cfg"] = self.cfg.to_dict()
        if isinstance(self.snr_db, tuple):
            data["snr_db"] = list(self.snr_db)
        return {"schema": DATASET_SCHEMA, **data}

    @classmethod
    def from_dict(cls, data: dict) -> "DatasetManifest":
        if data.get("schema") != DATASET_SCHEMA:
            raise InvalidArgumentError(
                f"Unsupported dataset schema {data.get('schema')!r}, expected {DATASET_SCHEMA!r}"
            )
        fields = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        fields["cfg"] = SystemConfig.from_dict(data["cfg"])
        if isinstance(fields.get("snr_db"), list):
            fields["snr_db"] = tuple(float(v) for v in fields["snr_db"])
        return cls(**fields)

    def digest(self) -> str:
        return canonical_json_hash(self.to_dict())


def new_manifest(
    profile: ScenarioProfile,
    cfg: SystemConfig,
    kind: str,
    q: int,
    count: int,
    seed: int,
    snr_db=10.0,
    depth: int | None = None,
    **options,
) -> DatasetManifest:
    """
    Manifest for a fresh dataset of a scenario profile.
    A list of SNR values selects the mixed-SNR mode; depth defaults to 1 (sf),
    the SFT interval count (sft) or the CEU length (spr).
    """
    if depth is None:
        depth = {"sf": 1, "sft": nparams.SFT_INTERVALS, "spr": nparams.CEU_LENGTH}.get(kind, 1)
    if isinstance(snr_db, (list, tuple)):
        snr_value, snr_mode = tuple(float(v) for v in snr_db), "mixed"
    else:
        snr_value, snr_mode = float(snr_db), "fixed"
    return DatasetManifest(
        scenario=profile.name,
        profile_hash=profile_hash(profile),
        cfg=cfg,
        kind=kind,
        q=q,
        count=count,
        seed=seed,
        snr_db=snr_value,
        snr_mode=snr_mode,
        depth=depth,
        **options,
    )
