"""Gate-set evaluation and closed-loop pulse optimization workbench."""

try:
    from gsopt._core import *  # noqa: F401,F403
    from gsopt._core import __doc__ as _core_doc
except ImportError:  # running against a bare CMake build tree
    from _core import *  # noqa: F401,F403
    from _core import __doc__ as _core_doc

__doc__ = _core_doc
__version__ = "0.1.0"
