"""
CSV and JSON artifacts of runs and sweeps.

Trace CSV columns are fixed; the schema version of every artifact family is
written into the JSON report (and into the sweep CSV as a column).
"""
import hashlib
import json
import logging
from pathlib import Path

import pandas as pd
from django.conf import settings

logger = logging.getLogger(__name__)

TRACE_COLUMNS = [
    'time_s',
    'ntl_label',
    'actual_x_m',
    'actual_y_m',
    'est_x_m',
    'est_y_m',
    'method',
    'abs_error_m',
]

FLOAT_FORMAT = '%.6f'


def schema_version():
    return settings.GRADELOC['SCHEMA_VERSION']


def trace_frame(trace):
    rows = []
    for sample in trace.samples:
        pos = sample.estimate.pos
        rows.append({
            'time_s': sample.time,
            'ntl_label': sample.label,
            'actual_x_m': float(sample.actual.x),
            'actual_y_m': float(sample.actual.y),
            'est_x_m': None if pos is None else float(pos.x),
            'est_y_m': None if pos is None else float(pos.y),
            'method': sample.estimate.method.value,
            'abs_error_m': sample.error,
        })
    return pd.DataFrame(rows, columns=TRACE_COLUMNS)


def frame_to_csv(frame):
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, na_rep='', lineterminator='\n')


def trace_csv(trace):
    return frame_to_csv(trace_frame(trace))


def trace_digest(trace):
    return hashlib.sha256(trace_csv(trace).encode('utf-8')).hexdigest()


def write_text(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(text.encode('utf-8'))
    logger.info('Wrote %s', path)
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


def write_trace_csv(trace, path):
    """Write the trace CSV and return the sha256 of its bytes."""
    return write_text(path, trace_csv(trace))


def write_json(path, payload):
    return write_text(path, json.dumps(payload, ensure_ascii=False, indent=4, sort_keys=True) + '\n')


def run_payload(scenario, trace, reports, digest=None):
    return {
        'schema_version': schema_version(),
        'scenario': scenario.name,
        'master_seed': scenario.master_seed,
        'duration_s': scenario.duration,
        'episodes': trace.episodes,
        'trace_sha256': digest,
        'reports': [report.to_dict() for report in reports],
    }


def write_sweep_csv(rows, path):
    frame = pd.DataFrame(rows)
    frame.insert(0, 'schema_version', schema_version())
    return write_text(path, frame_to_csv(frame))
