"""Constructive Loewner interpolation of frequency-response data."""

import json
from dataclasses import dataclass

import numpy as np

from ._cloe import (
    CloeConfig,
    CoincidentPoints,
    DimensionMismatch,
    DuplicateFrequency,
    Error,
    GridExhausted,
    InsufficientData,
    Interpolant,
    InvalidRange,
    NotConjugateClosed,
    ParseError,
    RankZero,
    SingularPencil,
    StateSpaceModel,
    BudgetTooSmall,
    ZeroDenominator,
    coarse_loewner,
    generate_modal_model,
    linf_relative_error,
    log_grid,
    read_model,
    run_comparison,
    seeded_suite,
    write_model,
)
from ._cloe import _run_cloe, _run_cloe_samples
from ._cloe import interpolate as _interpolate
from ._cloe import sweep as _sweep


@dataclass
class CloeResult:
    interpolant: Interpolant
    trace: dict
    oracle_calls: int

    @property
    def termination(self) -> str:
        return self.trace["termination"]


def interpolate(omegas, responses, rank_tol=1e-10):
    """Loewner interpolant of samples. responses: (len(omegas), outputs, inputs), or 1-D for SISO."""
    responses = np.asarray(responses, dtype=complex)
    if responses.ndim == 1:
        responses = responses.reshape(-1, 1, 1)
    return _interpolate(list(map(float, omegas)), responses, rank_tol)


def run_cloe(source, config=None, responses=None):
    """Run the constructive loop on a StateSpaceModel, or on tabulated (omegas, responses)."""
    config = config if config is not None else CloeConfig()
    if isinstance(source, StateSpaceModel):
        h, trace, calls = _run_cloe(source, config)
    else:
        data = np.asarray(responses, dtype=complex)
        if data.ndim == 1:
            data = data.reshape(-1, 1, 1)
        h, trace, calls = _run_cloe_samples(list(map(float, source)), data, config)
    return CloeResult(h, json.loads(trace), calls)


def sweep(models, n_f_values=(200, 300, 400, 500), epsilon_values=(0.01, 0.05, 0.10, 0.30),
          max_points=50, eval_points=2000, threads=0):
    """Compare CLOE with a coarse interpolant over models x n_f x epsilon. Returns (records, csv_text)."""
    return _sweep(list(models), list(n_f_values), list(epsilon_values), max_points, eval_points, threads)


__all__ = [n for n in dir() if not n.startswith("_") and n not in {"json", "np", "dataclass"}]
