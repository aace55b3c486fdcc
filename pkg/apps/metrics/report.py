"""
Localization error statistics of a trace.

Error index k (1..7) counts samples with error at most ERROR_BOUNDS[k-1]
meters, so ``within_bound`` is cumulative. ``index_histogram`` holds the
disjoint bins instead, with index 8 for errors above the last bound.
"""
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from apps.core.exceptions import EmptyTraceError, UndefinedOverhead
from apps.geometry.oracles import theoretical_mae

ERROR_BOUNDS = (2.0, 5.0, 10.0, 20.0, 30.0, 50.0, 75.0)
WITHIN_10M_INDEX = 3


@dataclass
class MetricsReport:
    """
    label - NTL label
    n_samples - samples with an estimate
    warmup - samples without an estimate, excluded from the errors
    cle - cumulative localization error, meters
    mae - cle / n_samples
    rmse - root mean squared error
    within_bound - error index -> fraction of samples within its bound
    index_histogram - error index -> samples whose smallest bound is that index
    fgl_count - fine-grained localizations fired
    fgl_unavailable - fine fixes skipped for anchor geometry
    fgl_overhead_vs_baseline - extra fixes relative to a paired baseline NTL
    """
    label: str
    n_samples: int
    warmup: int
    cle: float
    mae: float
    rmse: float
    within_bound: dict
    index_histogram: dict
    fgl_count: int = 0
    fgl_unavailable: int = 0
    fgl_overhead_vs_baseline: float = None

    @property
    def within_10m(self):
        return self.within_bound[WITHIN_10M_INDEX]

    def to_dict(self):
        data = asdict(self)
        data['within_bound'] = {str(k): v for k, v in self.within_bound.items()}
        data['index_histogram'] = {str(k): v for k, v in self.index_histogram.items()}
        return data


def error_index(errors):
    """Smallest error index whose bound holds, len(ERROR_BOUNDS) + 1 beyond the last."""
    return np.searchsorted(ERROR_BOUNDS, errors, side='left') + 1


def compute_metrics(trace, label):
    samples = trace.for_label(label)
    if not samples:
        raise EmptyTraceError(f'trace has no samples for {label!r}')
    errors = np.array([sample.error for sample in samples if sample.estimate.available], dtype=float)
    if errors.size == 0:
        raise EmptyTraceError(f'{label!r} never produced an estimate')

    n = int(errors.size)
    cle = float(errors.sum())
    indices = error_index(errors)
    return MetricsReport(
        label=label,
        n_samples=n,
        warmup=len(samples) - n,
        cle=cle,
        mae=cle / n,
        rmse=math.sqrt(float(np.mean(errors ** 2))),
        within_bound={k: float(np.mean(errors <= bound)) for k, bound in enumerate(ERROR_BOUNDS, start=1)},
        index_histogram={k: int(np.count_nonzero(indices == k)) for k in range(1, len(ERROR_BOUNDS) + 2)},
        fgl_count=sum(1 for _, event_label in trace.fgl_events if event_label == label),
        fgl_unavailable=sum(1 for _, event_label in trace.unavailable_events if event_label == label),
    )


def merge_reports(reports):
    """Sample-weighted combination of reports over disjoint parts of one NTL's samples."""
    if not reports:
        raise EmptyTraceError('nothing to merge')
    n = sum(report.n_samples for report in reports)
    cle = sum(report.cle for report in reports)
    return MetricsReport(
        label=reports[0].label,
        n_samples=n,
        warmup=sum(report.warmup for report in reports),
        cle=cle,
        mae=cle / n,
        rmse=math.sqrt(sum(report.n_samples * report.rmse ** 2 for report in reports) / n),
        within_bound={
            k: sum(report.n_samples * report.within_bound[k] for report in reports) / n
            for k in reports[0].within_bound
        },
        index_histogram={
            k: sum(report.index_histogram[k] for report in reports) for k in reports[0].index_histogram
        },
        fgl_count=sum(report.fgl_count for report in reports),
        fgl_unavailable=sum(report.fgl_unavailable for report in reports),
    )


def fgl_overhead(report, baseline):
    if baseline.fgl_count == 0:
        raise UndefinedOverhead(f'{baseline.label} fired no fine-grained localizations')
    return (report.fgl_count - baseline.fgl_count) / baseline.fgl_count


@dataclass(frozen=True)
class TheoryComparison:
    theory: float
    relative_delta: float


def compare_theory(sim_mae, cell_side, range_m):
    theory = theoretical_mae(cell_side, range_m)
    return TheoryComparison(theory=theory, relative_delta=(sim_mae - theory) / theory)


@dataclass
class MaeOrdering:
    """Whether paired MAEs follow the expected precision ladder, best first."""
    labels: tuple
    maes: list = field(default_factory=list)

    @property
    def holds(self):
        return all(a <= b for a, b in zip(self.maes, self.maes[1:]))


def mae_ordering(reports, labels):
    by_label = {report.label: report for report in reports}
    return MaeOrdering(labels=tuple(labels), maes=[by_label[label].mae for label in labels])
