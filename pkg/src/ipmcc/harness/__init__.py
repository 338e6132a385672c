"""Experiment orchestration: configs, ensembles, op-count audit, CSV output, CLI."""
