"""Horoballs, cusped spaces, quasi-isometry constants, graphs of groups and decomposition trees."""

__version__ = "0.1.0"
