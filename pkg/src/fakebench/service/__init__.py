"""HTTP service wrapping the core package."""

from .app import ServiceConfig, create_app

__all__ = ["ServiceConfig", "create_app"]
