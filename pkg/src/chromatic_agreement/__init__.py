"""Chromatic simplex agreement over chromatic subdivisions.

The package builds chromatic complexes and their subdivisions, simulates the
convergence algorithm under an adversarial immediate-snapshot scheduler, and
checks every run against the algorithm's correctness lemmas.
"""

__version__ = "0.1.0"
