"""
Command-line entrypoint of the mmWave channel-estimation toolkit.

Responsibilities:
- Subcommands gen, split, train, eval, sweep, robustness, overhead, flops and plot
- Merges a JSON config file (--config) under explicit flags
- Writes resolved_config.json next to every output so a run can be repeated from it alone
- Maps the toolkit's exceptions onto exit codes (utils.status)

Example:
    python cli.py gen --kind sf --q 2 --count 1000 --seed 1 --out data/sf
    python cli.py sweep --snr 0:5:30 --estimators ls,mmse-ideal --n-mc 2000 --out report.json
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from chanmodel.scenario import load_profile
from chanmodel.system_config import SystemConfig
from datapipe.generator import generate_dataset
from datapipe.manifest import new_manifest
from datapipe.splitting import REFERENCE_FRACTIONS, split
from datapipe.storage import load_dataset, save_dataset
from evalbench import evalbench_params as eparams
from evalbench.complexity import complexity_report
from evalbench.estimators import CnnEstimator, LsEstimator, MmseEstimator, SampleMmseEstimator
from evalbench.experiments import evaluate_dataset, overhead_experiment, robustness_eval, snr_sweep
from evalbench.plotting import plot_report
from evalbench.report import load_report, save_report
from neuralest import neuralest_params as nparams
from neuralest.artifact import load_model, load_state, save_model
from neuralest.netspec import build_net, flops_cnn, parse_kind, reference_spec
from neuralest.training import TrainConfig, train
from pilotfront.pilot_config import spr_schedule
from utils.errors import (
    DataIntegrityError,
    InvalidArgumentError,
    NumericalRankError,
    ProtocolError,
    TrainingDivergedError,
)
from utils.settings import LOG_LEVEL
from utils.status import Status, status_for_exception

logger = logging.getLogger(__name__)

RESOLVED_CONFIG = "resolved_config.json"
HISTORY_FILE = "history.json"
ESTIMATORS = ("ls", "mmse-ideal", "mmse-sample", "sf-cnn", "sft-cnn")
REQUIRED = {
    "gen": ["out"],
    "split": ["data", "out"],
    "train": ["data", "out"],
    "eval": ["model", "data"],
    "sweep": ["out"],
    "robustness": ["test_scenarios", "out"],
    "overhead": ["spr_models", "sf_model", "out"],
    "flops": [],
    "plot": ["report", "out"],
}


def parse_snr(text) -> list[float]:
    """
    '10' -> [10.0]; '0,10,20' -> [0.0, 10.0, 20.0]; '0:5:30' -> 0, 5, ..., 30 (stop included).
    """
    if isinstance(text, (int, float)):
        return [float(text)]
    if isinstance(text, list):
        return [float(v) for v in text]
    text = str(text).strip()
    if ":" in text:
        try:
            start, step, stop = (float(v) for v in text.split(":"))
        except ValueError as e:
            raise InvalidArgumentError(f"SNR range must be start:step:stop, got {text!r}") from e
        if step <= 0 or stop < start:
            raise InvalidArgumentError(f"SNR range {text!r} needs step > 0 and stop >= start")
        count = int(round((stop - start) / step)) + 1
        return [start + i * step for i in range(count)]
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise InvalidArgumentError(f"cannot parse SNR list {text!r}") from e


def parse_lr_schedule(text) -> tuple[tuple[int, float], ...]:
    """'200:1e-4,400:5e-5,200:1e-5' -> ((200, 1e-4), (400, 5e-5), (200, 1e-5))."""
    if isinstance(text, list):
        return tuple((int(span), float(lr)) for span, lr in text)
    try:
        steps = [step.split(":") for step in str(text).split(",") if step.strip()]
        return tuple((int(span), float(lr)) for span, lr in steps)
    except ValueError as e:
        raise InvalidArgumentError(f"LR schedule must look like 200:1e-4,400:5e-5, got {text!r}") from e


def _names(text) -> list[str]:
    if isinstance(text, list):
        return [str(v) for v in text]
    return [v.strip() for v in str(text).split(",") if v.strip()]


def _system(args) -> SystemConfig:
    return SystemConfig.from_dict(args.system or {})


def _jsonable(value):
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    return value


def write_resolved(directory, args, **extra) -> Path:
    """Write the merged flags and config (plus any derived settings) as resolved_config.json."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    payload = {k: _jsonable(v) for k, v in vars(args).items() if k not in ("func", "config")}
    payload.update({k: _jsonable(v) for k, v in extra.items()})
    path = directory / RESOLVED_CONFIG
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def cmd_gen(args) -> int:
    cfg = _system(args)
    profile = load_profile(args.scenario)
    snr = parse_snr(args.snr_db)
    manifest = new_manifest(
        profile,
        cfg,
        args.kind,
        args.q,
        args.count,
        args.seed,
        snr_db=snr if len(snr) > 1 else snr[0],
        depth=args.depth,
        scale_c=args.scale_c,
        rho=args.rho,
        temporal_model=args.temporal_model,
        reduced_m_tx=args.reduced_m_tx,
        reduced_m_rx=args.reduced_m_rx,
    )
    paths = generate_dataset(manifest, args.out, profile=profile, workers=args.workers, progress=True)
    write_resolved(args.out, args, manifest=manifest.to_dict())
    for path in paths:
        print(path)
    return Status.SUCCESS


def cmd_split(args) -> int:
    dataset = load_dataset(args.data)
    fractions = [float(v) for v in _names(args.fractions)]
    total = sum(fractions)
    if len(fractions) != 3 or total <= 0:
        raise InvalidArgumentError(f"--fractions needs three nonnegative weights, got {args.fractions}")
    parts = split(dataset, [f / total for f in fractions], seed=args.seed)
    out = Path(args.out)
    for part in parts:
        save_dataset(part, out / part.manifest.split)
    write_resolved(out, args)
    print(" ".join(f"{part.manifest.split}={len(part)}" for part in parts))
    return Status.SUCCESS


def _train_config(args) -> TrainConfig:
    if args.lr_schedule:
        schedule = parse_lr_schedule(args.lr_schedule)
        epochs = args.epochs or sum(span for span, _ in schedule)
        return TrainConfig(epochs=epochs, lr_schedule=schedule, batch_size=args.batch, seed=args.seed)
    if args.epochs:
        return TrainConfig.scaled(args.epochs, seed=args.seed, batch_size=args.batch)
    return TrainConfig(batch_size=args.batch, seed=args.seed)


def cmd_train(args) -> int:
    dataset = load_dataset(args.data)
    manifest = dataset.manifest
    if args.val:
        train_part, val_part = dataset, load_dataset(args.val)
    else:
        train_part, val_part, _ = split(dataset, (0.9, 0.1, 0.0), seed=args.seed)
    net_kind = args.net or manifest.net_kind
    if net_kind != manifest.net_kind:
        raise InvalidArgumentError(f"--net {net_kind} does not match the {manifest.net_kind} dataset")
    base = reference_spec(q=manifest.q, spatial_shape=manifest.cfg.spatial_shape, scale_c=manifest.scale_c)
    spec = build_net(net_kind, manifest.q, manifest.depth, base=base)
    init_state = None
    if args.init:
        init_spec, init_state = load_state(args.init)
        if init_spec != spec:
            raise InvalidArgumentError(f"--init model {init_spec.name} has another architecture than {spec.name}")
    tc = _train_config(args)
    result = train(spec, train_part, val_part, tc, init_state=init_state, progress=True)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_model(
        out,
        spec,
        result.estimator.state_dict(),
        best_state=result.best_state,
        metadata={
            "dataset": manifest.to_dict(),
            "train_config": tc.to_dict(),
            "best_epoch": result.best_epoch,
        },
    )
    with open(out / HISTORY_FILE, "w", encoding="utf-8") as f:
        json.dump(result.history, f, indent=2)
        f.write("\n")
    write_resolved(out, args, train_config=tc.to_dict())
    print(out)
    return Status.SUCCESS


def cmd_eval(args) -> int:
    net = load_model(args.model, best=args.best)
    result = evaluate_dataset(net, load_dataset(args.data))
    text = json.dumps(result, indent=2, sort_keys=True)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text + "\n", encoding="utf-8")
        write_resolved(out.parent, args)
    print(text)
    return Status.SUCCESS


def build_estimators(args, profile, cfg, n_intervals: int = 1) -> list:
    """Estimator wrappers named in --estimators; CNN entries load their model directories."""
    estimators = []
    for name in _names(args.estimators):
        if name == "ls":
            estimators.append(LsEstimator())
        elif name == "mmse-ideal":
            estimators.append(
                MmseEstimator.ideal(
                    profile,
                    cfg,
                    args.q,
                    s=n_intervals,
                    n_mc=args.cov_n_mc,
                    seed=args.seed,
                    rho=args.rho,
                    temporal_model=args.temporal_model,
                    cache_dir=args.cov_cache,
                    workers=args.workers,
                )
            )
        elif name == "mmse-sample":
            estimators.append(SampleMmseEstimator(s=n_intervals))
        elif name in ("sf-cnn", "sft-cnn"):
            model = args.model if name == "sf-cnn" else args.sft_model
            if not model:
                flag = "--model" if name == "sf-cnn" else "--sft-model"
                raise InvalidArgumentError(f"estimator {name} needs {flag} MODEL_DIR")
            estimators.append(CnnEstimator(load_model(model), name=name))
        else:
            raise InvalidArgumentError(f"unknown estimator {name!r}; choose from {ESTIMATORS}")
    return estimators


def cmd_sweep(args) -> int:
    cfg = _system(args)
    profile = load_profile(args.scenario)
    estimators = build_estimators(args, profile, cfg, args.n_intervals)
    report = snr_sweep(
        estimators,
        parse_snr(args.snr),
        profile,
        cfg,
        q=args.q,
        n_mc=args.n_mc,
        seed=args.seed,
        n_intervals=args.n_intervals,
        rho=args.rho,
        temporal_model=args.temporal_model,
        workers=args.workers,
    )
    path = save_report(report, args.out)
    write_resolved(path.parent, args)
    print(path)
    return Status.SUCCESS


def cmd_robustness(args) -> int:
    cfg = _system(args)
    train_profile = load_profile(args.scenario)
    test_profiles = [load_profile(name) for name in _names(args.test_scenarios)]
    estimators = build_estimators(args, train_profile, cfg, args.n_intervals)
    report = robustness_eval(
        estimators,
        train_profile,
        test_profiles,
        parse_snr(args.snr),
        cfg,
        q=args.q,
        n_mc=args.n_mc,
        seed=args.seed,
        n_intervals=args.n_intervals,
        rho=args.rho,
        temporal_model=args.temporal_model,
        workers=args.workers,
    )
    path = save_report(report, args.out)
    write_resolved(path.parent, args)
    print(path)
    return Status.SUCCESS


def cmd_overhead(args) -> int:
    cfg = _system(args)
    profile = load_profile(args.scenario)
    nets = [load_model(path) for path in _names(args.spr_models)]
    schedule = spr_schedule(
        cfg,
        1.0,
        ceu_length=len(nets),
        reduced_m_tx=args.reduced_m_tx,
        reduced_m_rx=args.reduced_m_rx,
    )
    report = overhead_experiment(
        nets,
        load_model(args.sf_model),
        schedule,
        parse_snr(args.snr),
        profile,
        cfg,
        q=args.q,
        n_mc=args.n_mc,
        seed=args.seed,
        rho=args.rho,
        temporal_model=args.temporal_model,
        workers=args.workers,
        cov_n_mc=args.cov_n_mc,
        cov_cache_dir=args.cov_cache,
        joint_mmse=not args.no_joint_mmse,
    )
    path = save_report(report, args.out)
    write_resolved(path.parent, args)
    print(path)
    return Status.SUCCESS


def _flops_depth(args) -> int:
    """S for sft, d for spr; unset means the reference depth of the family."""
    if args.s_or_d is not None:
        return args.s_or_d
    family, _ = parse_kind(args.net)
    return {"sft": nparams.SFT_INTERVALS, "spr": nparams.CEU_LENGTH}.get(family, 1)


def cmd_flops(args) -> int:
    cfg = _system(args)
    base = reference_spec(q=args.q, spatial_shape=cfg.spatial_shape)
    spec = build_net(args.net, args.q, _flops_depth(args), base=base)
    table = complexity_report(args.q, args.s, cfg, [spec])
    print(table.to_string(index=False))
    print(f"{spec.name} CNN FLOPs (Q={spec.q}): {flops_cnn(spec)}")
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        table.to_csv(out, index=False)
        write_resolved(out.parent, args)
    return Status.SUCCESS


def cmd_plot(args) -> int:
    labels = plot_report(load_report(args.report), args.out, title=args.title)
    write_resolved(Path(args.out).parent, args)
    print(", ".join(labels))
    return Status.SUCCESS


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON file of defaults; explicit flags win.")
    parser.add_argument("--workers", type=int, default=None, help="Worker threads (default: logical cores).")
    parser.add_argument("--seed", type=int, default=0, help="Master seed.")


def _scenario_flags(parser: argparse.ArgumentParser, default_scenario: str = "umi-nlos-like") -> None:
    parser.add_argument("--scenario", default=default_scenario, help="Shipped profile name or profile JSON path.")
    parser.add_argument("--q", type=int, default=2, help="Adjacent subcarriers Q.")
    parser.add_argument("--rho", type=float, default=None, help="Interval correlation (default: from Doppler).")
    parser.add_argument(
        "--temporal-model", default="gauss-markov", choices=["gauss-markov", "doppler"], help="Channel evolution."
    )


def _experiment_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--snr", default="0:5:30", help="SNR points in dB: start:step:stop or a comma list.")
    parser.add_argument("--n-mc", type=int, default=eparams.N_MC, help="Realizations per SNR point.")
    parser.add_argument("--out", type=Path, help="Report JSON path.")


def _estimator_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--estimators", default="ls", help=f"Comma list from {', '.join(ESTIMATORS)}.")
    parser.add_argument("--model", type=Path, help="Model directory of the sf-cnn estimator.")
    parser.add_argument("--sft-model", type=Path, help="Model directory of the sft-cnn estimator.")
    parser.add_argument("--n-intervals", type=int, default=1, help="Intervals per realization (S).")
    parser.add_argument("--cov-n-mc", type=int, default=eparams.COVARIANCE_N_MC, help="Draws of the ideal covariance.")
    parser.add_argument("--cov-cache", type=Path, default=None, help="Covariance cache directory.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cli.py", description="mmWave MIMO-OFDM channel estimation toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {}

    p = sub.add_parser("gen", help="Generate a training dataset.")
    _common(p)
    _scenario_flags(p)
    p.add_argument("--kind", default="sf", choices=["sf", "sft", "spr"], help="Estimator family.")
    p.add_argument("--depth", type=int, default=None, help="S for sft, CEU length D for spr.")
    p.add_argument("--snr-db", default="10", help="Training SNR in dB; a comma list selects mixed SNR.")
    p.add_argument("--count", type=int, default=1000, help="Number of samples.")
    p.add_argument("--scale-c", type=float, default=nparams.SCALE_C, help="Target scaling constant c.")
    p.add_argument("--reduced-m-tx", type=int, default=16, help="Beamformers in reduced SPR intervals.")
    p.add_argument("--reduced-m-rx", type=int, default=4, help="Combiners in reduced SPR intervals.")
    p.add_argument("--out", type=Path, help="Dataset directory.")
    p.set_defaults(func=cmd_gen, system=None)
    commands["gen"] = p

    p = sub.add_parser("split", help="Split a dataset into train/val/test directories.")
    _common(p)
    p.add_argument("--data", type=Path, help="Dataset directory.")
    p.add_argument(
        "--fractions", default=",".join(f"{f:.12g}" for f in REFERENCE_FRACTIONS), help="Train,val,test weights."
    )
    p.add_argument("--out", type=Path, help="Output directory (gets train/, val/, test/).")
    p.set_defaults(func=cmd_split)
    commands["split"] = p

    p = sub.add_parser("train", help="Train a CNN estimator on a dataset.")
    _common(p)
    p.add_argument("--data", type=Path, help="Training dataset directory.")
    p.add_argument("--val", type=Path, help="Validation dataset directory (default: 10%% of --data).")
    p.add_argument("--net", help="sf, sft or spr-<d>; must match the dataset.")
    p.add_argument("--epochs", type=int, default=None, help=f"Training epochs (default {nparams.EPOCHS}).")
    p.add_argument("--lr-schedule", default=None, help="Epoch spans and rates, e.g. 200:1e-4,400:5e-5,200:1e-5.")
    p.add_argument("--batch", type=int, default=nparams.BATCH_SIZE, help="Batch size.")
    p.add_argument("--init", type=Path, help="Model directory to fine-tune from.")
    p.add_argument("--out", type=Path, help="Model directory.")
    p.set_defaults(func=cmd_train)
    commands["train"] = p

    p = sub.add_parser("eval", help="NMSE of a trained model on a stored dataset.")
    _common(p)
    p.add_argument("--model", type=Path, help="Model directory.")
    p.add_argument("--data", type=Path, help="Dataset directory.")
    p.add_argument("--best", action="store_true", help="Use the best-validation weights.")
    p.add_argument("--out", type=Path, help="Optional result JSON path.")
    p.set_defaults(func=cmd_eval)
    commands["eval"] = p

    p = sub.add_parser("sweep", help="NMSE versus SNR.")
    _common(p)
    _scenario_flags(p)
    _experiment_flags(p)
    _estimator_flags(p)
    p.set_defaults(func=cmd_sweep, system=None)
    commands["sweep"] = p

    p = sub.add_parser("robustness", help="NMSE on the training scenario and on unseen ones.")
    _common(p)
    _scenario_flags(p)
    _experiment_flags(p)
    _estimator_flags(p)
    p.add_argument("--test-scenarios", help="Comma list of test profiles (include the training one).")
    p.set_defaults(func=cmd_robustness, system=None)
    commands["robustness"] = p

    p = sub.add_parser("overhead", help="SPR-CNN against a full-pilot SF-CNN.")
    _common(p)
    _scenario_flags(p)
    _experiment_flags(p)
    p.add_argument("--spr-models", help="Comma list of the D SPR model directories, d = 1 first.")
    p.add_argument("--sf-model", type=Path, help="Full-pilot SF-CNN model directory.")
    p.add_argument("--reduced-m-tx", type=int, default=16, help="Beamformers in reduced intervals.")
    p.add_argument("--reduced-m-rx", type=int, default=4, help="Combiners in reduced intervals.")
    p.add_argument("--cov-n-mc", type=int, default=eparams.COVARIANCE_N_MC, help="Draws of the ideal covariance.")
    p.add_argument("--cov-cache", type=Path, default=None, help="Covariance cache directory.")
    p.add_argument("--no-joint-mmse", action="store_true", help="Skip the MMSE curves over the whole CEU.")
    p.set_defaults(func=cmd_overhead, system=None)
    commands["overhead"] = p

    p = sub.add_parser("flops", help="FLOP table of the estimators.")
    _common(p)
    p.add_argument("--net", default="sf", help="sf, sft, spr or spr-<d>.")
    p.add_argument("--q", type=int, default=2, help="Adjacent subcarriers Q.")
    p.add_argument(
        "--s-or-d",
        type=int,
        default=None,
        help=f"S for sft (default {nparams.SFT_INTERVALS}), d for spr (default {nparams.CEU_LENGTH}).",
    )
    p.add_argument("--s", type=int, default=1, help="Intervals of the joint MMSE.")
    p.add_argument("--out", type=Path, help="Optional CSV path.")
    p.set_defaults(func=cmd_flops, system=None)
    commands["flops"] = p

    p = sub.add_parser("plot", help="Draw NMSE curves of a report.")
    _common(p)
    p.add_argument("report", nargs="?", type=Path, help="Report JSON.")
    p.add_argument("--out", type=Path, help="Figure path (.svg or .png).")
    p.add_argument("--title", default=None, help="Figure title.")
    p.set_defaults(func=cmd_plot)
    commands["plot"] = p

    parser.commands = commands
    return parser


def _read_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidArgumentError(f"cannot read config file {path}: {e}") from e
    if not isinstance(data, dict):
        raise InvalidArgumentError(f"config file {path} must hold a JSON object")
    return {key.replace("-", "_"): value for key, value in data.items()}


def parse_args(argv=None) -> argparse.Namespace:
    """
    Parse flags, merging --config values underneath them.
    Raises:
        SystemExit: Usage errors (exit code 2), including missing required flags.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    subparser = parser.commands[args.command]
    if args.config:
        try:
            config = _read_config(args.config)
        except InvalidArgumentError as e:
            subparser.error(str(e))
        unknown = sorted(set(config) - set(vars(args)))
        if unknown:
            subparser.error(f"unknown config keys: {', '.join(unknown)}")
        subparser.set_defaults(**config)
        args = parser.parse_args(argv)
    missing = [name for name in REQUIRED[args.command] if getattr(args, name, None) in (None, "")]
    if missing:
        flags = ", ".join("--" + name.replace("_", "-") for name in missing)
        subparser.error(f"the following arguments are required: {flags}")
    return args


def main(argv=None) -> int:
    logging.basicConfig(level=LOG_LEVEL, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    args = parse_args(argv)
    try:
        return args.func(args)
    except (
        InvalidArgumentError,
        DataIntegrityError,
        NumericalRankError,
        TrainingDivergedError,
        ProtocolError,
    ) as e:
        logger.error(f"    ✖ {args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return status_for_exception(e)


if __name__ == "__main__":
    sys.exit(main())
