"""Tables for the terminal and CSV files for --out."""
import numpy as np
import pandas as pd

from .estimation import wald
from .selection import VuongPreference

CSV_FLOAT_FORMAT = '%.17g'


def fit_frame(fit_result, level=0.95):
    """parameter, estimate, ASE, p-value, interval; NaN where ASEs are unusable."""
    columns = ['parameter', 'estimate', 'ase', 'p_value', 'lower', 'upper']
    if fit_result.ase_valid:
        records = [
            (row.name, row.estimate, row.ase, row.p_value, row.lower, row.upper)
            for row in wald(fit_result, level)
        ]
    else:
        records = [
            (name, estimate, ase, np.nan, np.nan, np.nan)
            for name, estimate, ase in zip(fit_result.names, fit_result.beta_hat.pack(), fit_result.ase)
        ]
    return pd.DataFrame.from_records(records, columns=columns)


def fit_summary(fit_result):
    return {
        'n': fit_result.n,
        'log-likelihood': fit_result.loglik,
        'converged': fit_result.converged,
        'boundary': fit_result.boundary,
        'singular': fit_result.singular,
        'iterations': fit_result.iterations,
        'zero fraction (observed)': fit_result.observed_zero_fraction,
        'zero fraction (predicted)': fit_result.predicted_zero_fraction,
    }


def vuong_frame(comparisons):
    """`comparisons` is a list of (label_a, label_b, VuongResult)."""
    return pd.DataFrame.from_records(
        [
            (a, b, result.statistic, result.p_value, result.mean_lr, result.sd_lr,
             _verdict(a, b, result))
            for a, b, result in comparisons
        ],
        columns=['model_a', 'model_b', 'statistic', 'p_value', 'mean_lr', 'sd_lr', 'preferred'],
    )


def _verdict(label_a, label_b, result):
    if result.preferred == VuongPreference.MODEL_A:
        return label_a
    if result.preferred == VuongPreference.MODEL_B:
        return label_b
    return VuongPreference.INDETERMINATE.label


def study_header(report):
    lines = [
        f'scenario {report.scenario} ({report.link.value}), n={report.n}, '
        f'reps={report.reps}, seed={report.seed}',
    ]
    if report.eps is not None:
        lines.append(f'generating eps = {report.eps:g}')
    lines.append(
        f'convergence failures: {report.failures}/{report.reps}; '
        f'mean zero-inflation ratio: {report.mean_zi_ratio:.4f}'
    )
    return lines


def format_frame(frame, decimals=4):
    return frame.to_string(index=False, float_format=lambda value: f'{value:.{decimals}f}')


def write_csv(frame, path):
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
