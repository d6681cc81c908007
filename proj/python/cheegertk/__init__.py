"""Weighted-manifold spectral Cheeger toolkit (python bindings)."""

try:
    from ._core import *  # noqa: F401,F403
    from . import _core  # noqa: F401
except ImportError:  # in-tree builds put _core next to the package on sys.path
    from _core import *  # noqa: F401,F403
    import _core  # noqa: F401

__all__ = [name for name in dir(_core) if not name.startswith("_")]
