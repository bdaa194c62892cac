"""Interval bounds for off-policy evaluation by Lipschitz value iteration."""

import json

from ._lipvi import (
    Dataset,
    Environment,
    LipviError,
    Policy,
    __version__,
    cli,
    collect,
    envelope,
    estimate_lipschitz,
    ground_truth,
    hoeffding_lower,
    is_estimate,
    lp_bound,
    propagate,
    sample_init_points,
)
from ._lipvi import _bounds_json


def bounds(data, target, init, *, gamma=0.95, eta=2.0, max_iters=100, tol=None, subsample=0,
           action_samples=128, kappa=1.1, max_escalations=20, seed=0):
    """Run both chains and return the report as a dict (same fields as the CLI's JSON)."""
    return json.loads(_bounds_json(data, target, [list(p) for p in init], gamma, eta, max_iters, tol,
                                   subsample, action_samples, kappa, max_escalations, seed))


__all__ = [
    "Dataset",
    "Environment",
    "LipviError",
    "Policy",
    "bounds",
    "cli",
    "collect",
    "envelope",
    "estimate_lipschitz",
    "ground_truth",
    "hoeffding_lower",
    "is_estimate",
    "lp_bound",
    "propagate",
    "sample_init_points",
]
