"""
Report files for an ExperimentResult.

Every file is a pure function of the result, so emitting twice gives
byte-identical output.
"""
import csv
import logging
from pathlib import Path

import numpy as np

from . import __version__
from .anomaly import NoEvents, write_detections
from .config import INIT_NOISY, INIT_ORACLE
from .json import dumps
from .metrics import Never

logger = logging.getLogger(__name__)

SUMMARY_HEADER = ['strategy', 'reward_oracle', 'reward_noisy', 'recall']
RUNS_HEADER = [
    'seed', 'strategy', 'init_mode', 'reward', 'reward_sum', 'recall', 'normalized_recall', 'time_to_coverage_95',
]
REWARDS_HEADER = ['t', 'rho', 'rho_oracle', 'ratio']
COVERAGE_HEADER = ['t', 'fraction']
TRADEOFF_HEADER = ['exploration_rate', 'strategy', 'reward', 'recall']


def slug(identifier):
    return identifier.replace(':', '-')


def _cell(value):
    if value is None:
        return ''
    if isinstance(value, (NoEvents, Never)):
        return str(value)
    if isinstance(value, float):
        return '' if value != value else repr(value)
    return str(value)


def _write_csv(path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as fp:
        writer = csv.writer(fp, lineterminator='\n')
        writer.writerow(header)
        writer.writerows([_cell(value) for value in row] for row in rows)
    logger.info('Wrote %s.', path)
    return path


def _write_text(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as fp:
        fp.write(text)
    logger.info('Wrote %s.', path)
    return path


def summary_rows(result):
    return [
        (s.strategy, s.reward.get(INIT_ORACLE), s.reward.get(INIT_NOISY), s.recall)
        for s in result.strategies
    ]


def run_rows(result):
    return [
        (run.seed, run.strategy, run.init_mode, run.reward, run.reward_sum, run.recall,
         run.normalized_recall, run.time_to_coverage)
        for run in result.runs
    ]


def tradeoff_rows(result):
    """
    Reward against recall keyed by exploration rate. ``c-eps-greedy`` runs take
    precedence over ``so-policy``/``random`` at the same rate.
    """
    chosen = {}
    for summary in result.strategies:
        rate = summary.exploration_rate
        if rate is None:
            continue
        current = chosen.get(rate)
        if current is None or summary.strategy.startswith('c-eps-greedy'):
            chosen[rate] = summary

    reward_mode = result.config.init_modes[0]
    return [
        (rate, s.strategy, s.reward.get(reward_mode), s.recall)
        for rate, s in sorted(chosen.items())
    ]


def _series_rows(series):
    frames, rho, rho_oracle, ratio = series
    return zip(frames.tolist(), rho.tolist(), rho_oracle.tolist(), ratio.tolist())


def reward_by_seed(result):
    """Mean reward ratio of every run, per strategy and initialization, in ``config.seeds`` order."""
    position = {seed: index for index, seed in enumerate(result.config.seeds)}
    table = {}
    for run in result.runs:
        row = table.setdefault(run.strategy, {}).setdefault(run.init_mode, np.full(len(position), np.nan))
        row[position[run.seed]] = run.reward
    return table


def manifest(result):
    cfg = result.config
    return {
        'name': 'riskbandit',
        'version': __version__,
        'config': cfg,
        'capacity': cfg.capacity,
        'seeds': list(cfg.seeds),
        'strategies': [spec.identifier for spec in cfg.strategies],
        'full_recall': {str(seed): _cell(value) for seed, value in sorted(result.full_recall.items())},
        'reward_by_seed': reward_by_seed(result),
        'detections': {str(seed): len(records) for seed, records in sorted(result.detections.items())},
    }


def _emit(result, output_dir):
    written = [
        _write_csv(output_dir / 'summary.csv', SUMMARY_HEADER, summary_rows(result)),
        _write_csv(output_dir / 'runs.csv', RUNS_HEADER, run_rows(result)),
        _write_csv(output_dir / 'tradeoff.csv', TRADEOFF_HEADER, tradeoff_rows(result)),
    ]
    for summary in result.strategies:
        for init_mode, series in sorted(summary.series.items()):
            name = '{0}__{1}.csv'.format(slug(summary.strategy), init_mode)
            written.append(_write_csv(output_dir / 'rewards' / name, REWARDS_HEADER, _series_rows(series)))
        if summary.coverage is not None:
            rows = zip(summary.coverage.frames.tolist(), summary.coverage.fractions.tolist())
            path = output_dir / 'coverage' / (slug(summary.strategy) + '.csv')
            written.append(_write_csv(path, COVERAGE_HEADER, rows))
    for seed, records in sorted(result.detections.items()):
        path = write_detections(records, output_dir / 'detections' / 'seed-{0}.csv'.format(seed))
        logger.info('Wrote %s (%d full-stream detections).', path, len(records))
        written.append(path)
    written.append(_write_text(output_dir / 'manifest.json', dumps(manifest(result))))
    return written


def emit_reports(result, output_dir):
    """Write every report under ``output_dir`` and return the written paths."""
    output_dir = Path(output_dir)
    try:
        return _emit(result, output_dir)
    except OSError as exc:
        raise OSError(exc.errno, 'Could not write reports to {0}: {1}'.format(
            exc.filename or output_dir, exc.strerror or exc)) from exc
