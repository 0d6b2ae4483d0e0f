#!/usr/bin/env python3
"""
Run the k-NN connectivity laboratory from a source checkout.

Usage:
    python scripts/knn_lab.py <command> [options]

Run with --help for the list of commands and their options.
"""

import sys
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
