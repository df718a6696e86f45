"""Python surface of the qawa toolkit.

The compiled extension lives inside the package when installed, or on
sys.path next to it when used straight from a build tree.
"""

try:
    from ._qawa import *  # noqa: F401,F403
    from ._qawa import __doc__  # noqa: F401
except ImportError:
    from _qawa import *  # noqa: F401,F403
    from _qawa import __doc__  # noqa: F401

__version__ = "0.1.0"
