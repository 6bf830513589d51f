"""Kelly leverage, hash-rate equilibrium and Monte Carlo for proof-of-work miners."""

from ._minerkelly import *  # noqa: F401,F403
from ._minerkelly import ScenarioError, NonConvergenceError  # noqa: F401


def example_values(name):
    """Worked example as a {quantity: value} dict."""
    return {row["quantity"]: row["value"] for row in example(name)}  # noqa: F405
