"""Harmonic analysis on stratified groups: group law, grid calculus, Littlewood-Paley pieces."""

import json

from ._core import (
    Group,
    GridSpec,
    HgError,
    KernelBank,
    abelian,
    canonical_config,
    convolve,
    default_config,
    engel,
    grid_for,
    group_by_name,
    heisenberg,
    integral,
    make_test_function,
    parse_group,
    xk,
)
from ._core import run_suite as _run_suite


def run_suite(config_text: str):
    """Run the suites selected in a config; returns (exit_code, report dict)."""
    code, payload = _run_suite(config_text)
    return code, json.loads(payload)


__all__ = [
    "Group",
    "GridSpec",
    "HgError",
    "KernelBank",
    "abelian",
    "canonical_config",
    "convolve",
    "default_config",
    "engel",
    "grid_for",
    "group_by_name",
    "heisenberg",
    "integral",
    "make_test_function",
    "parse_group",
    "run_suite",
    "xk",
]
