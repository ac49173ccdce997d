"""
Runtime configuration for the toolkit.

Responsibilities:
- Loads a local .env file (if present) into the environment
- Exposes worker count, torch device, log level and cache locations as module constants
- Values can be overridden per shell, e.g. MMW_DEVICE=cuda python cli.py train ...
"""

import os

from dotenv import load_dotenv

load_dotenv()

DEFAULT_WORKERS = int(os.getenv("MMW_WORKERS", os.cpu_count() or 1))
TORCH_DEVICE = os.getenv("MMW_DEVICE", "cpu")
LOG_LEVEL = os.getenv("MMW_LOG_LEVEL", "INFO")
COVARIANCE_CACHE_DIR = os.getenv("MMW_COV_CACHE", ".cache/covariance")
RUN_SLOW_TESTS = os.getenv("MMW_RUN_SLOW", "0") == "1"
