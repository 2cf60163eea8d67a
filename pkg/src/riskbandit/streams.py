"""
Text formats for risk streams and security events.

Streams are ``t,user_id,risk`` rows, one per (frame, user) in frame-major
order. Events live next to the stream as ``<stem>.events.csv`` with rows
``user_id,start,length,base_risk``. Floats are written with ``repr`` so a
read after a write returns exactly the same values.
"""
import csv
import logging
import math
import os
from pathlib import Path

import numpy as np

from .exceptions import StreamParseError
from .simulation import GroundTruth, SecurityEvent

logger = logging.getLogger(__name__)

STREAM_HEADER = ['t', 'user_id', 'risk']
EVENTS_HEADER = ['user_id', 'start', 'length', 'base_risk']
EVENTS_SUFFIX = '.events.csv'


def events_path_for(path):
    path = Path(path)
    stem = path.name[:-len(path.suffix)] if path.suffix else path.name
    return path.with_name(stem + EVENTS_SUFFIX)


def _open_for_write(path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return open(path, 'w', newline='', encoding='utf-8')


def write_stream(gt: GroundTruth, path, events_path=None):
    """Write the risk stream to ``path`` and its events beside it."""
    with _open_for_write(path) as fp:
        writer = csv.writer(fp, lineterminator='\n')
        writer.writerow(STREAM_HEADER)
        for t in range(gt.n_frames):
            row = gt.true_risks[t]
            writer.writerows((t, user_id, repr(float(risk))) for user_id, risk in enumerate(row))

    write_events(gt.events, events_path or events_path_for(path))
    logger.info('Wrote %d frames x %d users to %s.', gt.n_frames, gt.n_users, path)


def write_events(events, path):
    with _open_for_write(path) as fp:
        writer = csv.writer(fp, lineterminator='\n')
        writer.writerow(EVENTS_HEADER)
        for event in events:
            writer.writerow((event.user_id, event.start, event.length, repr(float(event.base_risk))))


def _decoded(path, fp, expected):
    """Decode a binary file line by line; undecodable bytes become parse errors."""
    for number, raw in enumerate(fp, start=1):
        try:
            yield raw.decode('utf-8')
        except UnicodeDecodeError as exc:
            if number == 1:
                field = 'header'
            else:
                field = expected[min(raw[:exc.start].count(b','), len(expected) - 1)]
            raise StreamParseError(path, number, field, 'invalid UTF-8 byte 0x{0:02x}'.format(raw[exc.start]))


def _reader(path, fp, expected):
    return csv.reader(_decoded(path, fp, expected))


def _next_row(path, reader):
    try:
        return next(reader, None)
    except csv.Error as exc:
        raise StreamParseError(path, reader.line_num, 'row', str(exc))


def _check_header(path, reader, expected):
    header = _next_row(path, reader)
    if header is None:
        raise StreamParseError(path, 1, 'header', 'file is empty')
    header = [column.strip() for column in header]
    if header != expected:
        message = 'expected {0!r}, got {1!r}'.format(','.join(expected), ','.join(header))
        raise StreamParseError(path, 1, 'header', message)


def _parse_int(path, line, field, raw, minimum=0):
    try:
        value = int(raw)
    except ValueError:
        raise StreamParseError(path, line, field, 'expected an integer, got {0!r}'.format(raw))
    if value < minimum:
        raise StreamParseError(path, line, field, 'must be >= {0}, got {1}'.format(minimum, value))
    return value


def _parse_risk(path, line, field, raw):
    try:
        value = float(raw)
    except ValueError:
        raise StreamParseError(path, line, field, 'expected a decimal number, got {0!r}'.format(raw))
    if not math.isfinite(value) or value < 0:
        raise StreamParseError(path, line, field, 'must be a finite non-negative number, got {0!r}'.format(raw))
    return value


def _rows(path, reader, expected):
    width = len(expected)
    while True:
        row = _next_row(path, reader)
        if row is None:
            return
        if not row:
            continue
        if len(row) != width:
            field = expected[min(len(row), width - 1)]
            raise StreamParseError(path, reader.line_num, field, 'expected {0} fields, got {1}'.format(width, len(row)))
        yield reader.line_num, row


def read_events(path):
    with open(path, 'rb') as fp:
        reader = _reader(path, fp, EVENTS_HEADER)
        _check_header(path, reader, EVENTS_HEADER)
        events = []
        for line, (user_id, start, length, base_risk) in _rows(path, reader, EVENTS_HEADER):
            events.append(SecurityEvent(
                user_id=_parse_int(path, line, 'user_id', user_id),
                start=_parse_int(path, line, 'start', start),
                length=_parse_int(path, line, 'length', length, minimum=1),
                base_risk=_parse_risk(path, line, 'base_risk', base_risk),
            ))
    return events


def _read_cells(path):
    cells = {}
    last_line = 1
    with open(path, 'rb') as fp:
        reader = _reader(path, fp, STREAM_HEADER)
        _check_header(path, reader, STREAM_HEADER)
        for line, (t, user_id, risk) in _rows(path, reader, STREAM_HEADER):
            key = (_parse_int(path, line, 't', t), _parse_int(path, line, 'user_id', user_id))
            if key in cells:
                raise StreamParseError(path, line, 'user_id', 'duplicate row for t={0}, user_id={1}'.format(*key))
            cells[key] = _parse_risk(path, line, 'risk', risk)
            last_line = line
    return cells, last_line


def read_stream(path, events_path=None) -> GroundTruth:
    """
    Parse a stream file (and its events file, when present) into a GroundTruth.

    Every (t, user_id) pair of the implied grid must appear exactly once.
    """
    cells, last_line = _read_cells(path)

    n_frames = 1 + max((t for t, _ in cells), default=-1)
    n_users = 1 + max((u for _, u in cells), default=-1)
    if len(cells) != n_frames * n_users:
        missing = next((t, u) for t in range(n_frames) for u in range(n_users) if (t, u) not in cells)
        raise StreamParseError(path, last_line, 't', 'no row for t={0}, user_id={1}'.format(*missing))

    risks = np.zeros((n_frames, n_users), dtype=float)
    for (t, user_id), risk in cells.items():
        risks[t, user_id] = risk

    events_path = Path(events_path) if events_path else events_path_for(path)
    if os.path.exists(events_path):
        events = read_events(events_path)
        for index, event in enumerate(events):
            if event.user_id >= n_users:
                raise StreamParseError(events_path, index + 2, 'user_id', 'unknown user {0}'.format(event.user_id))
    else:
        logger.warning('No events file at %s; recall will be reported as no-events.', events_path)
        events = []

    return GroundTruth(risks, events)
