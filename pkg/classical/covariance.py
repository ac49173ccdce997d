"""
Channel covariance models for the MMSE baselines.

Responsibilities:
- CovarianceModel: Hermitian covariance over the joint (subcarrier, interval) vector with provenance
- Ensemble ("ideal") covariance from Monte-Carlo draws of the scenario, parallel over chunks
- Per-realization ("non-ideal") covariance from a single LS estimate by block lag averaging
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from chanmodel.scenario import ScenarioProfile, profile_hash
from chanmodel.system_config import SystemConfig
from chanmodel.temporal import draw_channel_block
from classical.joint_vector import JointLayout
from utils.errors import InvalidArgumentError
from utils.seeding import derive_seed
from utils.settings import DEFAULT_WORKERS

logger = logging.getLogger(__name__)

SOURCES = ("ensemble-true", "per-realization-sample")
# Draws per worker task; fixed so the reduction order never depends on the worker count
CHUNK_SIZE = 256
HERMITIAN_TOL = 1e-10
DEFAULT_RELATIVE_LOADING = 1e-3


@dataclass(frozen=True, eq=False)
class CovarianceModel:
    matrix: np.ndarray
    source: str
    layout: JointLayout
    loading: float = 0.0
    n_mc: int | None = None
    seed: int | None = None
    profile_hash: str | None = None

    def __post_init__(self):
        if self.source not in SOURCES:
            raise InvalidArgumentError(f"source must be one of {SOURCES}, got {self.source!r}")
        if self.matrix.shape != (self.layout.dim, self.layout.dim):
            raise InvalidArgumentError(
                f"covariance shape {self.matrix.shape} does not match layout dimension {self.layout.dim}"
            )
        if self.loading < 0:
            raise InvalidArgumentError(f"loading must be >= 0, got {self.loading}")
        scale = max(1.0, float(np.max(np.abs(self.matrix), initial=0.0)))
        if np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0) > HERMITIAN_TOL * scale:
            raise InvalidArgumentError("covariance matrix is not Hermitian")

    @property
    def dim(self) -> int:
        return self.layout.dim

    def describe(self) -> dict:
        return {
            "source": self.source,
            "dim": self.dim,
            "loading": self.loading,
            "n_mc": self.n_mc,
            "seed": self.seed,
            "profile_hash": self.profile_hash,
        }


def hermitize(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.conj().T)


def _outer_sum(profile, cfg, layout, seed, start, stop, rho, temporal_model) -> np.ndarray:
    vecs = np.empty((stop - start, layout.dim), dtype=np.complex128)
    for row, i in enumerate(range(start, stop)):
        block = draw_channel_block(
            profile,
            cfg,
            layout.q,
            layout.s,
            derive_seed(seed, i),
            rho=rho,
            temporal_model=temporal_model,
        )
        vecs[row] = layout.stack(block.entries)
    # sum_i v_i v_i^H
    return vecs.T @ vecs.conj()


def ensemble_covariance(
    profile: ScenarioProfile,
    cfg: SystemConfig,
    q: int,
    s: int,
    n_mc: int,
    seed: int,
    rho: float | None = None,
    temporal_model: str = "gauss-markov",
    workers: int | None = None,
) -> CovarianceModel:
    """
    Monte-Carlo estimate of the true joint covariance (1/n_mc) * sum v v^H.

    Draw i uses the seed derive_seed(seed, i), so the first n draws are shared by every
    n_mc >= n and the estimate does not depend on the worker count.
    Args:
        profile (ScenarioProfile): Scenario statistics.
        cfg (SystemConfig): System parameters.
        q (int): Number of adjacent subcarriers Q.
        s (int): Number of coherence intervals S.
        n_mc (int): Number of Monte-Carlo draws.
        seed (int): Master seed.
        rho (float, optional): Interval correlation; default from the profile's Doppler.
        temporal_model (str): 'gauss-markov' or 'doppler'.
        workers (int, optional): Thread count; default MMW_WORKERS.
    Returns:
        CovarianceModel: source 'ensemble-true', no loading.
    """
    if n_mc < 1:
        raise InvalidArgumentError(f"n_mc must be >= 1, got {n_mc}")
    layout = JointLayout.for_system(cfg, q, s)
    if n_mc < layout.dim:
        logger.warning(
            f"    ⚠ n_mc={n_mc} is below the covariance dimension {layout.dim}; "
            f"the ensemble covariance is rank deficient"
        )
    workers = workers or DEFAULT_WORKERS
    bounds = [(a, min(a + CHUNK_SIZE, n_mc)) for a in range(0, n_mc, CHUNK_SIZE)]
    logger.info(
        f"  ↳ Ensemble covariance for '{profile.name}': dim={layout.dim}, n_mc={n_mc}, "
        f"{len(bounds)} chunks on {workers} workers"
    )
    with ThreadPoolExecutor(max_workers=workers) as executor:
        partials = executor.map(
            lambda b: _outer_sum(profile, cfg, layout, seed, b[0], b[1], rho, temporal_model),
            bounds,
        )
        total = np.zeros((layout.dim, layout.dim), dtype=np.complex128)
        for partial in partials:
            total += partial
    return CovarianceModel(
        matrix=hermitize(total / n_mc),
        source="ensemble-true",
        layout=layout,
        n_mc=n_mc,
        seed=seed,
        profile_hash=profile_hash(profile),
    )


def _block_lag_average(blocks: np.ndarray, dq: int, ds: int) -> np.ndarray:
    q, s, block_dim = blocks.shape
    later = blocks[max(0, dq) : q + min(0, dq), max(0, ds) : s + min(0, ds)]
    earlier = blocks[max(0, -dq) : q - max(0, dq), max(0, -ds) : s - max(0, ds)]
    later = later.reshape(-1, block_dim)
    earlier = earlier.reshape(-1, block_dim)
    return (later.T @ earlier.conj()) / (q * s)


def sample_covariance_from_ls(
    h_ls, layout: JointLayout, loading: float | None = None
) -> CovarianceModel:
    """
    Covariance estimated from one LS joint vector.

    The Q*S block sub-vectors are treated as samples of a process that is stationary over
    subcarrier and interval lags; the covariance between blocks (q1, s1) and (q2, s2) is the
    biased lag average C(q1 - q2, s1 - s2), which keeps the result PSD. Diagonal loading eps
    is added on top.
    Args:
        h_ls (np.ndarray): LS joint vector of length layout.dim.
        layout (JointLayout): Joint dimensions.
        loading (float, optional): Absolute eps >= 0; default 1e-3 * trace / dim.
    Returns:
        CovarianceModel: source 'per-realization-sample'.
    """
    h_ls = np.asarray(h_ls, dtype=np.complex128)
    if h_ls.shape != (layout.dim,):
        raise InvalidArgumentError(f"h_ls must have shape ({layout.dim},), got {h_ls.shape}")
    if loading is not None and loading < 0:
        raise InvalidArgumentError(f"loading must be >= 0, got {loading}")
    blocks = layout.block_vectors(h_ls)
    b = layout.block_dim
    lags = {
        (dq, ds): _block_lag_average(blocks, dq, ds)
        for dq in range(-(layout.q - 1), layout.q)
        for ds in range(-(layout.s - 1), layout.s)
    }
    matrix = np.empty((layout.dim, layout.dim), dtype=np.complex128)
    index = [(q, s) for q in range(layout.q) for s in range(layout.s)]
    for i, (q1, s1) in enumerate(index):
        for j, (q2, s2) in enumerate(index):
            matrix[i * b : (i + 1) * b, j * b : (j + 1) * b] = lags[(q1 - q2, s1 - s2)]
    matrix = hermitize(matrix)
    if loading is None:
        loading = DEFAULT_RELATIVE_LOADING * float(np.real(np.trace(matrix))) / layout.dim
    matrix += loading * np.eye(layout.dim)
    return CovarianceModel(
        matrix=matrix, source="per-realization-sample", layout=layout, loading=loading
    )
