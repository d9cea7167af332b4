"""Actual causality, responsibility and blame over structural causal models,
with bridges into LTL model checking, coverage, counterexample explanation and
ternary circuit refinement."""

__version__ = "0.1.0"
