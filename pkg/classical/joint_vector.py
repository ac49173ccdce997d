"""
Joint vectorization of channel blocks over subcarriers and coherence intervals.

Responsibilities:
- Fixes the stacking order of vec(H_k[n]) blocks: subcarrier outer, interval inner
- Column-major vec of each (N_R, N_T) block
- Converts between (..., Q, S, N_R, N_T) arrays and (..., Q*S*N_R*N_T) joint vectors
"""

from dataclasses import dataclass

import numpy as np

from chanmodel.system_config import SystemConfig
from utils.errors import InvalidArgumentError


@dataclass(frozen=True)
class JointLayout:
    q: int
    s: int
    n_rx: int
    n_tx: int

    def __post_init__(self):
        if min(self.q, self.s, self.n_rx, self.n_tx) < 1:
            raise InvalidArgumentError(f"JointLayout dimensions must be >= 1, got {self}")

    @classmethod
    def for_system(cls, cfg: SystemConfig, q: int, s: int = 1) -> "JointLayout":
        return cls(q=q, s=s, n_rx=cfg.n_rx, n_tx=cfg.n_tx)

    @property
    def block_dim(self) -> int:
        return self.n_rx * self.n_tx

    @property
    def n_blocks(self) -> int:
        return self.q * self.s

    @property
    def dim(self) -> int:
        return self.n_blocks * self.block_dim

    def stack(self, blocks) -> np.ndarray:
        """
        (..., Q, S, N_R, N_T) -> (..., Q*S*N_R*N_T).
        """
        blocks = np.asarray(blocks)
        expected = (self.q, self.s, self.n_rx, self.n_tx)
        if blocks.shape[-4:] != expected:
            raise InvalidArgumentError(f"blocks shape {blocks.shape} does not end in {expected}")
        # column-major vec: swap the matrix axes before flattening
        return np.swapaxes(blocks, -1, -2).reshape(blocks.shape[:-4] + (self.dim,))

    def unstack(self, vec) -> np.ndarray:
        """
        (..., Q*S*N_R*N_T) -> (..., Q, S, N_R, N_T).
        """
        vec = np.asarray(vec)
        if vec.shape[-1] != self.dim:
            raise InvalidArgumentError(
                f"joint vector length {vec.shape[-1]} does not match layout dimension {self.dim}"
            )
        split = vec.reshape(vec.shape[:-1] + (self.q, self.s, self.n_tx, self.n_rx))
        return np.swapaxes(split, -1, -2)

    def block_vectors(self, vec) -> np.ndarray:
        """(..., dim) -> (..., Q, S, N_R*N_T): the per-(k, n) sub-vectors."""
        vec = np.asarray(vec)
        return vec.reshape(vec.shape[:-1] + (self.q, self.s, self.block_dim))
