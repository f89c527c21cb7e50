"""Reproducing kernels and weighted harmonic function spaces on the unit ball."""

import json

from . import _hball
from ._hball import (
    AdmissibilityError,
    NonConvergent,
    UnsupportedPair,
    coefficient_branch,
    dim_spherical_harmonics,
    fit_kernel_growth,
    gamma_coeff,
    gamma_ratio,
    gauss_jacobi,
    gegenbauer,
    growth_exponent,
    kernel_eval,
    membership_kernel_atom,
    weight_constant,
    zonal,
)


def run_experiment(name, config=None):
    """Run an experiment by id and return its report as a dict."""
    return json.loads(_hball.run_experiment_json(name, json.dumps(config or {})))


__all__ = [
    "AdmissibilityError",
    "NonConvergent",
    "UnsupportedPair",
    "coefficient_branch",
    "dim_spherical_harmonics",
    "fit_kernel_growth",
    "gamma_coeff",
    "gamma_ratio",
    "gauss_jacobi",
    "gegenbauer",
    "growth_exponent",
    "kernel_eval",
    "membership_kernel_atom",
    "run_experiment",
    "weight_constant",
    "zonal",
]
