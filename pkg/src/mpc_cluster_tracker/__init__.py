"""MPC Cluster Tracker - cluster and track multipath components across snapshots."""

__version__ = "0.1.0"
