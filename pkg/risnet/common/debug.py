"""Defines functions to be use for debug."""

# External Imports
# Import only with "import package",
# it will make explicity in the code where it came from.

# Turns all annotations into string literals.
# This is one exception to the external import rule.
from __future__ import annotations
import json
import traceback
import numpy


def _describe(values: numpy.ndarray) -> str:
    values = numpy.asarray(values, dtype=float).ravel()
    if values.size == 0:
        return "<none>"
    return (f"min={values.min():.6e} median={numpy.median(values):.6e} "
            f"max={values.max():.6e}")


def debug_link_stats(scenario) -> str:
    """
    Summarizes the path losses and Rician factors of a scenario
    to be used for troubleshooting.

    Arguments:
        scenario: Scenario to describe.
    """

    config = scenario.config
    stats = scenario.stats
    information = (f"Dimensions:\nM={config.M} K={config.K} L={config.L} "
                   f"N={config.N} ({config.N1}x{config.N2})"
                   f"\nPowers:\nP_max={config.P_max} W sigma2={config.sigma2} W "
                   f"rho={scenario.rho:.6e} rho_p={scenario.rho_p:.6e}"
                   f"\nBS-RIS distance (m):\n{_describe(stats.d_1)}"
                   f"\nBS-user distance (m):\n{_describe(stats.d_d)}"
                   f"\nRIS-user distance (m):\n{_describe(stats.d_2)}"
                   f"\nbeta_1:\n{_describe(stats.beta_1)}"
                   f"\nbeta_d:\n{_describe(stats.beta_d)}"
                   f"\nbeta_2:\n{_describe(stats.beta_2)}"
                   f"\nkappa_d:\n{_describe(stats.kappa_d)}"
                   f"\nkappa_2:\n{_describe(stats.kappa_2)}\n")
    return information


def debug_ballpark(mismatches: list, scenario) -> str:
    """
    Lists reference values that were not reproduced,
    followed by the link statistics of the scenario.

    Arguments:
        mismatches: List of dictionaries with the reference, the observed
            value and the relative deviation.
        scenario: Scenario of the experiment.
    """

    body = json.dumps(mismatches, indent=4)
    return (f"Ballpark Mismatches:\n{body}\n"
            f"{debug_link_stats(scenario)}")


def debug_point(context: dict, cause: Exception) -> str:
    """
    Provides information about a sweep point that failed.

    Arguments:
        context: Description of the sweep point.
        cause: Exception raised while evaluating the point.
    """

    body = json.dumps(context, indent=4, default=str)
    trace = "".join(traceback.format_exception(
        type(cause), cause, cause.__traceback__))
    return (f"Sweep Point:\n{body}"
            f"\nError:\n{type(cause).__name__}: {cause}"
            f"\nTraceback:\n{trace}\n")
