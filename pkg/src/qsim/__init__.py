"""qsim — cascaded atom-cavity open quantum system simulator."""

from qsim._version import __version__

__all__ = ["__version__"]
