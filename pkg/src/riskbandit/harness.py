"""
Experiment runner.

For every seed the harness simulates (or replays) a ground truth, runs every
(strategy, initialization) pair over frames ``1 .. T-1`` with frame 0 as the
prior, and scores the selections for reward, coverage and normalized recall.
"""
import hashlib
import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .anomaly import NO_EVENTS, NoEvents, ZScoreDetector, event_recall, normalized_recall
from .config import INIT_ORACLE, ExperimentConfig, StrategySpec
from .exceptions import UndefinedNormalization
from .metrics import CoverageCurve, coverage_from_matrix, reward_ratios, time_to_coverage
from .simulation import RiskFrame, simulate
from .strategies import build_strategy, initialize, noisy_priors, oracle_priors
from .streams import read_stream

logger = logging.getLogger(__name__)

COVERAGE_TARGET = 0.95
NOISY_INIT_STREAM = 'noisy-init'
INITIAL_SELECTION_STREAM = ':frame-0'


def derive_rng(seed, label):
    """Generator keyed on (seed, label), independent of which other runs exist."""
    digest = hashlib.sha256('{0}:{1}'.format(seed, label).encode('utf-8')).digest()
    words = np.frombuffer(digest, dtype=np.uint32)
    return np.random.default_rng(np.random.SeedSequence(words.tolist()))


@dataclass
class RunRecord:
    seed: int
    strategy: str
    init_mode: str
    frames: np.ndarray
    rho: np.ndarray
    rho_oracle: np.ndarray
    ratio: np.ndarray
    coverage: CoverageCurve
    recall: object
    normalized_recall: object

    @property
    def reward(self):
        return float(self.ratio.mean()) if self.ratio.size else math.nan

    @property
    def reward_sum(self):
        return math.fsum(self.ratio.tolist())

    @property
    def time_to_coverage(self):
        return time_to_coverage(self.coverage, COVERAGE_TARGET)


@dataclass
class StrategySummary:
    strategy: str
    exploration_rate: Optional[float]
    reward: Dict[str, float] = field(default_factory=dict)
    recall: object = NO_EVENTS
    coverage: Optional[CoverageCurve] = None
    series: Dict[str, Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]] = field(default_factory=dict)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    strategies: List[StrategySummary]
    runs: List[RunRecord]
    full_recall: Dict[int, object]
    detections: Dict[int, list] = field(default_factory=dict)

    def summary(self, strategy):
        return next(s for s in self.strategies if s.strategy == strategy)


def _priors(gt, seed, init_mode, mix):
    first = gt.true_risks[0] if gt.n_frames else np.zeros(gt.n_users)
    if init_mode == INIT_ORACLE:
        return oracle_priors(first)
    return noisy_priors(first, derive_rng(seed, NOISY_INIT_STREAM), mix)


def _monitored(risks, selected):
    # sorted before summing so equal sets give bit-equal sums
    return np.sort(np.take_along_axis(risks, selected, axis=1), axis=1).sum(axis=1)


def _observations(frames, selected, risks):
    ts = np.repeat(frames, selected.shape[1])
    users = selected.reshape(-1)
    return ts, users, risks[ts, users]


def _normalize(recall, full, seed, identifier):
    try:
        # capping is logged by the anomaly module
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', RuntimeWarning)
            return normalized_recall(recall, full)
    except UndefinedNormalization:
        logger.warning('Seed %d: full-stream recall is zero; normalized recall of %s is undefined.', seed, identifier)
        return math.nan


def _initial_selection(gt, spec, store, size, seed):
    # own stream: the frame-0 draw leaves the selections of frames 1 .. T-1 unchanged
    opening = build_strategy(spec, store, size, derive_rng(seed, spec.identifier + INITIAL_SELECTION_STREAM))
    return opening.select(0, gt.frame(0)).users


def run_strategy(gt, seed, spec: StrategySpec, init_mode, cfg: ExperimentConfig, full_recall):
    """
    Run one (seed, strategy, initialization) task over frames 1 .. T-1.

    The policy's frame-0 pick from its priors is logged for coverage only.
    """
    run_cfg = cfg.strategy_config(spec, seed, gt.n_users)
    size = run_cfg.capacity
    store = initialize(_priors(gt, seed, init_mode, cfg.noisy_mix), run_cfg.window_k)
    strategy = build_strategy(spec, store, size, derive_rng(run_cfg.seed, spec.identifier))

    frames = np.arange(1, gt.n_frames, dtype=np.int64)
    initial = _initial_selection(gt, spec, store, size, run_cfg.seed) if frames.size else ()
    selected = np.zeros((frames.size, size), dtype=np.int64)
    for i, t in enumerate(frames):
        risks = gt.true_risks[t]
        users = np.array(strategy.select(int(t), RiskFrame(int(t), risks)).users, dtype=np.int64)
        strategy.observe(int(t), dict(zip(users.tolist(), risks[users].tolist())))
        selected[i] = users

    scored = gt.true_risks[1:]
    rho = _monitored(scored, selected)
    rho_oracle = np.ascontiguousarray(np.sort(scored, axis=1)[:, gt.n_users - size:]).sum(axis=1)

    detections = ZScoreDetector(cfg.detector).detect(_observations(frames, selected, gt.true_risks))
    recall = event_recall(detections, gt)

    logger.debug('Seed %d: %s (%s init) done.', seed, spec.identifier, init_mode)
    return RunRecord(
        seed=seed,
        strategy=spec.identifier,
        init_mode=init_mode,
        frames=frames,
        rho=rho,
        rho_oracle=rho_oracle,
        ratio=reward_ratios(rho, rho_oracle),
        coverage=coverage_from_matrix(frames, selected, gt.n_users, initial),
        recall=recall,
        normalized_recall=_normalize(recall, full_recall, seed, spec.identifier),
    )


def full_stream_detections(gt, cfg: ExperimentConfig):
    """Detector output on every user at every scored frame 1 .. T-1."""
    frames = np.arange(1, gt.n_frames, dtype=np.int64)
    everyone = np.tile(np.arange(gt.n_users, dtype=np.int64), (frames.size, 1))
    return ZScoreDetector(cfg.detector).detect(_observations(frames, everyone, gt.true_risks))


def full_stream_recall(gt, cfg: ExperimentConfig):
    return event_recall(full_stream_detections(gt, cfg), gt)


def _run_task(args):
    return run_strategy(*args)


def _run_seed(gt, seed, cfg, executor):
    detections = full_stream_detections(gt, cfg)
    full = event_recall(detections, gt)
    logger.info(
        'Seed %d: %d events, %d full-stream detections, full-stream recall %s.',
        seed, len(gt.events), len(detections), full,
    )
    tasks = [
        (gt, seed, spec, init_mode, cfg, full)
        for spec in cfg.strategies
        for init_mode in cfg.init_modes
    ]
    runs = list(executor.map(_run_task, tasks) if executor else map(_run_task, tasks))
    return full, detections, runs


def _mean(values):
    values = [v for v in values if not isinstance(v, NoEvents) and not math.isnan(v)]
    if not values:
        return None
    return math.fsum(values) / len(values)


def _summarize(spec, runs, init_modes):
    mine = [run for run in runs if run.strategy == spec.identifier]
    summary = StrategySummary(spec.identifier, spec.exploration_rate)

    for init_mode in init_modes:
        batch = [run for run in mine if run.init_mode == init_mode]
        summary.reward[init_mode] = _mean([run.reward for run in batch])
        summary.series[init_mode] = (
            batch[0].frames,
            np.mean([run.rho for run in batch], axis=0),
            np.mean([run.rho_oracle for run in batch], axis=0),
            np.mean([run.ratio for run in batch], axis=0),
        )

    primary = [run for run in mine if run.init_mode == init_modes[0]]
    recalls = [run.normalized_recall for run in primary]
    if all(isinstance(recall, NoEvents) for recall in recalls):
        summary.recall = NO_EVENTS
    else:
        summary.recall = _mean(recalls)
    summary.coverage = CoverageCurve(
        primary[0].coverage.frames,
        np.mean([run.coverage.fractions for run in primary], axis=0),
    )
    return summary


def aggregate(cfg: ExperimentConfig, runs, full_recall, detections=None) -> ExperimentResult:
    init_modes = cfg.init_modes
    strategies = [_summarize(spec, runs, init_modes) for spec in cfg.strategies]
    return ExperimentResult(cfg, strategies, runs, full_recall, detections or {})


def _execute(cfg, ground_truths):
    runs, full_recall, detections = [], {}, {}
    executor = ProcessPoolExecutor(max_workers=cfg.parallelism) if cfg.parallelism > 1 else None
    try:
        for seed, gt in ground_truths:
            full_recall[seed], detections[seed], seed_runs = _run_seed(gt, seed, cfg, executor)
            runs.extend(seed_runs)
    finally:
        if executor is not None:
            executor.shutdown()
    return aggregate(cfg, runs, full_recall, detections)


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Simulate one ground truth per seed and run the whole strategy matrix on each."""
    ground_truths = ((seed, simulate(cfg.sim.replace(seed=seed))) for seed in cfg.seeds)
    return _execute(cfg, ground_truths)


def replay(stream_path, events_path, cfg: ExperimentConfig) -> ExperimentResult:
    """Run the strategy matrix on a recorded stream; seeds only drive the strategies."""
    gt = read_stream(stream_path, events_path)
    cfg = cfg.replace(sim=cfg.sim.replace(n_users=gt.n_users, n_frames=gt.n_frames))
    return _execute(cfg, ((seed, gt) for seed in cfg.seeds))
