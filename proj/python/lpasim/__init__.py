"""Liquid-payment-auction simulation and verification engine."""

try:
    from ._lpasim import *  # noqa: F401,F403
    from ._lpasim import __version__  # noqa: F401
except ImportError:  # build-tree layout: extension sits on sys.path directly
    from _lpasim import *  # noqa: F401,F403
    from _lpasim import __version__  # noqa: F401
