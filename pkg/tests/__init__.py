"""Tests for MPC Cluster Tracker."""
