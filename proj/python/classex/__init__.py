"""Accuracy extrapolation for marginal multi-class classifiers.

The heavy lifting lives in the C++ extension module ``_classex``; this
package re-exports its public surface.
"""

try:
    # installed package layout: classex/_classex.so
    from classex._classex import (  # noqa: F401
        InputError,
        NumericError,
        ata_curve,
        basis_moments,
        extrapolate,
        kde_extrapolate,
        ranks,
        select_bandwidth,
        simulate_gaussian_task,
        test_accuracy,
        toy_favorability,
        toy_ga_exact,
        __version__,
    )
except ImportError:
    # build-tree layout: _classex.so on sys.path next to python/
    from _classex import (  # noqa: F401
        InputError,
        NumericError,
        ata_curve,
        basis_moments,
        extrapolate,
        kde_extrapolate,
        ranks,
        select_bandwidth,
        simulate_gaussian_task,
        test_accuracy,
        toy_favorability,
        toy_ga_exact,
        __version__,
    )

__all__ = [
    "InputError",
    "NumericError",
    "ata_curve",
    "basis_moments",
    "extrapolate",
    "kde_extrapolate",
    "ranks",
    "select_bandwidth",
    "simulate_gaussian_task",
    "test_accuracy",
    "toy_favorability",
    "toy_ga_exact",
    "__version__",
]
