"""Lorenz curve estimation with pointwise and simultaneous confidence bands."""

try:
    from ._core import *  # noqa: F401,F403
except ImportError:  # core module built outside the package (ctest runs)
    from _core import *  # noqa: F401,F403
