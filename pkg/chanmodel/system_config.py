"""
System configuration of the simulated hybrid mmWave MIMO-OFDM link.

Responsibilities:
- Holds antenna, RF-chain, subcarrier and sampling parameters in one validated object
- Provides JSON-friendly conversion for manifests and resolved CLI snapshots
"""

from dataclasses import asdict, dataclass

from chanmodel import chanmodel_params as params
from utils.errors import InvalidArgumentError


@dataclass(frozen=True)
class SystemConfig:
    n_tx: int = params.N_TX
    n_rx: int = params.N_RX
    n_tx_rf: int = params.N_TX_RF
    n_rx_rf: int = params.N_RX_RF
    n_subcarriers: int = params.N_SUBCARRIERS
    sample_rate_hz: float = params.SAMPLE_RATE_HZ
    carrier_hz: float = params.CARRIER_HZ
    spacing_ratio: float = params.SPACING_RATIO
    interval_s: float = params.INTERVAL_S

    def __post_init__(self):
        if not (self.n_tx >= self.n_tx_rf >= 1):
            raise InvalidArgumentError(
                f"Need n_tx >= n_tx_rf >= 1, got n_tx={self.n_tx}, n_tx_rf={self.n_tx_rf}"
            )
        if not (self.n_rx >= self.n_rx_rf >= 1):
            raise InvalidArgumentError(
                f"Need n_rx >= n_rx_rf >= 1, got n_rx={self.n_rx}, n_rx_rf={self.n_rx_rf}"
            )
        if self.spacing_ratio <= 0:
            raise InvalidArgumentError(f"spacing_ratio must be > 0, got {self.spacing_ratio}")
        if self.n_subcarriers < 1:
            raise InvalidArgumentError(
                f"n_subcarriers must be >= 1, got {self.n_subcarriers}"
            )
        if self.interval_s <= 0:
            raise InvalidArgumentError(f"interval_s must be > 0, got {self.interval_s}")

    @property
    def spatial_shape(self) -> tuple[int, int]:
        return (self.n_rx, self.n_tx)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SystemConfig":
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        return cls(**known)
