"""Core configuration and utilities for disco."""

from .config import settings

__all__ = ["settings"]
