from .adapter import main, serve

__all__ = ["main", "serve"]
