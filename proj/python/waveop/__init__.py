"""Python surface of the wave-operator dynamics engine."""

from waveop_native import *  # noqa: F401,F403
from waveop_native import __version__  # noqa: F401
