"""Exact truncated-series verification of WP-Bailey pair identities."""
from __future__ import annotations

__version__ = "0.1.0"
