try:
    from ._hedgetree import *  # noqa: F401,F403
    from ._hedgetree import __doc__  # noqa: F401
except ImportError:
    from _hedgetree import *  # noqa: F401,F403
    from _hedgetree import __doc__  # noqa: F401
