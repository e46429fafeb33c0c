"""Alignment scoring service speaking the /v1/align wire protocol."""

__version__ = "0.1.0"
