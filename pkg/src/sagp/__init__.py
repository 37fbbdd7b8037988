"""Sparse additive Gaussian process regression with soft interactions.

Typical use::

    from sagp import Dataset, RunConfig, fit_dataset, build_report

    ds = Dataset.from_arrays(X, y)
    res = fit_dataset(ds, RunConfig(iterations=1500, burn_in=500))
    report = build_report(res.trace, res.config)
"""

from ._backend import current as backend
from .data import Dataset, read_dataset
from .kernel import NumericalError
from .pipeline import Report, build_report, fit_dataset, predict_dataset, split_rows
from .sampler import FitResult, RunConfig, Trace, fit
from .simulate import SimSpec, generate

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "FitResult",
    "NumericalError",
    "Report",
    "RunConfig",
    "SimSpec",
    "Trace",
    "backend",
    "build_report",
    "fit",
    "fit_dataset",
    "generate",
    "predict_dataset",
    "read_dataset",
    "split_rows",
]
