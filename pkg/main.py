"""MPC Cluster Tracker entry point."""

import sys


def main() -> int:
    """Run the MPC Cluster Tracker command-line application."""
    from src.mpc_cluster_tracker.app import run

    return run()


if __name__ == "__main__":
    sys.exit(main())
