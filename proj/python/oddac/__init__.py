"""Online data-driven adaptive control for LTV systems."""

# The compiled module may live in a separate build tree during development.
__path__ = __import__("pkgutil").extend_path(__path__, __name__)

from ._core import (  # noqa: E402
    OddacError,
    RunResult,
    Scenario,
    __version__,
    analyze,
    check_dwell,
    estimate_lipschitz,
    load_scenario,
    run,
    scenario_from_json,
    solve_window,
)

__all__ = [
    "OddacError",
    "RunResult",
    "Scenario",
    "__version__",
    "analyze",
    "check_dwell",
    "estimate_lipschitz",
    "load_scenario",
    "run",
    "scenario_from_json",
    "solve_window",
]
