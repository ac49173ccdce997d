"""
Synthetic training data for the CNN estimators.

Responsibilities:
- Draws one (TE stack, scaled true channel) sample per index from a derived seed
- Builds SF, SFT and SPR datasets (SPR: one sub-dataset per CEU position)
- Rejects samples whose scaled targets leave [-1, 1] and records the count
- Writes the datasets with datapipe.storage

Sample i depends only on (master seed, i), so regenerating with any worker count yields
byte-identical files and changing one sample never perturbs another.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from tqdm import tqdm

from chanmodel.scenario import ScenarioProfile, load_profile, profile_hash
from chanmodel.temporal import draw_channel_block
from datapipe.manifest import DatasetManifest
from datapipe.storage import Dataset, save_dataset
from neuralest.network import stack_inputs
from pilotfront.front_end import received_pilots, snr_db_to_power, tentative_estimate
from pilotfront.pilot_config import PilotSchedule, pilot_config, spr_schedule, uniform_schedule
from utils.errors import InvalidArgumentError
from utils.seeding import derive_seed, rng_for
from utils.settings import DEFAULT_WORKERS

logger = logging.getLogger(__name__)

# Give up when this many candidates per requested sample were rejected
MAX_REJECTION_FACTOR = 10


@dataclass
class _Sample:
    index: int
    k0: int
    inputs: list[np.ndarray]
    targets: list[np.ndarray]


def _snr_values(manifest: DatasetManifest) -> tuple[float, ...]:
    return manifest.snr_db if isinstance(manifest.snr_db, tuple) else (manifest.snr_db,)


def _schedule_for(manifest: DatasetManifest, snr_db: float) -> PilotSchedule:
    power = snr_db_to_power(snr_db)
    if manifest.kind == "spr":
        return spr_schedule(
            manifest.cfg,
            power,
            ceu_length=manifest.depth,
            reduced_m_tx=manifest.reduced_m_tx,
            reduced_m_rx=manifest.reduced_m_rx,
        )
    return uniform_schedule(pilot_config(manifest.cfg, power), manifest.depth)


def draw_sample(
    manifest: DatasetManifest,
    profile: ScenarioProfile,
    index: int,
    schedules: dict[float, PilotSchedule] | None = None,
) -> _Sample | None:
    """
    Draw sample 'index' of a dataset.
    Returns:
        _Sample | None: One (inputs, targets) pair per CEU position for spr, a single pair
        otherwise; None when a scaled target entry exceeds 1 in magnitude.
    """
    cfg = manifest.cfg
    snr_values = _snr_values(manifest)
    snr_db = snr_values[0]
    if manifest.snr_mode == "mixed":
        snr_rng = rng_for(manifest.seed, index, 2)
        snr_db = snr_values[int(snr_rng.integers(len(snr_values)))]
    schedule = (schedules or {}).get(snr_db) or _schedule_for(manifest, snr_db)

    block = draw_channel_block(
        profile,
        cfg,
        manifest.q,
        manifest.depth,
        derive_seed(manifest.seed, index, 0),
        rho=manifest.rho,
        temporal_model=manifest.temporal_model,
    )
    noise_rng = rng_for(manifest.seed, index, 1)
    te = []
    for n in range(manifest.depth):
        y = received_pilots(block.interval(n), schedule[n], seed=noise_rng)
        te.append(tentative_estimate(y, schedule[n], cfg))

    # sf: one interval; sft: all S intervals feed the last one; spr: every prefix of the CEU
    lengths = range(1, manifest.depth + 1) if manifest.kind == "spr" else [manifest.depth]
    inputs, targets = [], []
    for m in lengths:
        target = stack_inputs(block.interval(m - 1)) / np.float32(manifest.scale_c)
        if np.max(np.abs(target)) > 1.0:
            return None
        inputs.append(stack_inputs(np.concatenate(te[:m], axis=0)))
        targets.append(target.astype(np.float32))
    return _Sample(index=index, k0=block.first_subcarrier, inputs=inputs, targets=targets)


def build_datasets(
    manifest: DatasetManifest,
    profile: ScenarioProfile | None = None,
    workers: int | None = None,
    progress: bool = False,
) -> list[Dataset]:
    """
    Generate a dataset in memory.
    Args:
        manifest (DatasetManifest): What to generate.
        profile (ScenarioProfile, optional): Scenario; default load_profile(manifest.scenario).
        workers (int, optional): Thread count; default MMW_WORKERS. Never changes the result.
        progress (bool): Show a tqdm bar.
    Returns:
        list[Dataset]: One dataset for sf/sft, D datasets (d = 1..D) for spr.
    Raises:
        InvalidArgumentError: Profile does not match the manifest hash, or nearly every
            candidate sample was rejected (scale_c too small).
    """
    profile = profile or load_profile(manifest.scenario)
    if profile_hash(profile) != manifest.profile_hash:
        raise InvalidArgumentError(
            f"profile '{profile.name}' ({profile_hash(profile)}) does not match the manifest "
            f"hash {manifest.profile_hash}"
        )
    workers = workers or DEFAULT_WORKERS
    schedules = {snr: _schedule_for(manifest, snr) for snr in _snr_values(manifest)}
    logger.info(
        f"  ↳ Generating {manifest.count} {manifest.kind} samples (Q={manifest.q}, "
        f"depth={manifest.depth}) for '{profile.name}' on {workers} workers"
    )

    accepted: list[_Sample] = []
    rejected, next_index = 0, 0
    max_candidates = MAX_REJECTION_FACTOR * manifest.count + 100
    bar = tqdm(total=manifest.count, desc=f"gen {manifest.kind}", disable=not progress)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        while len(accepted) < manifest.count:
            if next_index >= max_candidates:
                raise InvalidArgumentError(
                    f"rejected {rejected} of {next_index} candidates; scale_c={manifest.scale_c} "
                    "is too small for this scenario"
                )
            # one candidate per missing sample, so a batch never overfills
            batch = range(next_index, next_index + manifest.count - len(accepted))
            for sample in executor.map(lambda i: draw_sample(manifest, profile, i, schedules), batch):
                if sample is None:
                    rejected += 1
                else:
                    accepted.append(sample)
                    bar.update(1)
            next_index = batch.stop
    bar.close()
    if rejected:
        logger.warning(
            f"    ⚠ Rejected {rejected} samples with |Re|/|Im| of H above c={manifest.scale_c}"
        )

    n_outputs = manifest.depth if manifest.kind == "spr" else 1
    datasets = []
    for j in range(n_outputs):
        sub = manifest.with_updates(
            rejected=rejected,
            interval_index=j + 1 if manifest.kind == "spr" else manifest.interval_index,
        )
        n0 = j + 1 if manifest.kind == "spr" else manifest.depth
        meta = np.array([(s.k0, n0, s.index) for s in accepted], dtype=np.int64).reshape(-1, 3)
        datasets.append(
            Dataset(
                manifest=sub,
                inputs=np.stack([s.inputs[j] for s in accepted]),
                targets=np.stack([s.targets[j] for s in accepted]),
                meta=meta,
            )
        )
    logger.info(f"    ✓ Generated {manifest.count} samples ({rejected} rejected)")
    return datasets


def generate_dataset(
    manifest: DatasetManifest,
    out_dir,
    profile: ScenarioProfile | None = None,
    workers: int | None = None,
    progress: bool = False,
) -> list[Path]:
    """
    Generate and write a dataset.
    Args:
        manifest (DatasetManifest): What to generate.
        out_dir (str | Path): Dataset directory; spr datasets are written to out_dir/d1 .. out_dir/dD.
        profile (ScenarioProfile, optional): Scenario; default load_profile(manifest.scenario).
        workers (int, optional): Thread count.
        progress (bool): Show a tqdm bar.
    Returns:
        list[Path]: Written dataset directories.
    """
    out_dir = Path(out_dir)
    datasets = build_datasets(manifest, profile=profile, workers=workers, progress=progress)
    if manifest.kind != "spr":
        return [save_dataset(datasets[0], out_dir)]
    return [save_dataset(ds, out_dir / f"d{ds.manifest.interval_index}") for ds in datasets]
