"""File with version and history information."""

__version__ = '1.0.0'

"""
History Information:
0.1.0
    First Version, scenario and channel models.
0.2.0
    Added both channel estimation protocols.
0.3.0
    Added deterministic equivalents and MRT rates.
0.4.0
    Added projected gradient ascent.
    Gradient now uses rank-one updates instead of full re-evaluation.
0.5.0
    Added genetic algorithm for the I-CSI design.
0.6.0
    Added Monte-Carlo module with jackknife standard errors.
0.7.0
    Added experiments, presets and command line.
0.7.1
    Results no longer depend on the number of threads.
0.8.0
    Added selftest and the debug file option.
1.0.0
    Added desk scale presets and reference values.
"""
