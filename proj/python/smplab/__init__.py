"""Python interface to the smplab core library.

The compiled extension exposes the matrix/operator primitives and the
experiment harness; ``run_experiment`` takes and returns JSON strings so the
configuration schema matches the ``smplab`` CLI exactly.
"""

try:
    from ._smplab import *  # noqa: F401,F403
    from ._smplab import __doc__ as _core_doc  # noqa: F401
except ImportError:  # running against a build tree instead of a wheel
    from _smplab import *  # noqa: F401,F403

__version__ = "0.1.0"
