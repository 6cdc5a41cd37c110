"""Python bindings for the paufsim core."""

try:
    from ._paufsim import *  # noqa: F401,F403
    from ._paufsim import __version__  # noqa: F401
except ImportError:  # in-tree test runs put the module on sys.path directly
    from _paufsim import *  # noqa: F401,F403
    from _paufsim import __version__  # noqa: F401
