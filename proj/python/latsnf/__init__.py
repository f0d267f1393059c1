"""Exact lattice toolkit: systematic normal forms, coset maps, discrete
Gaussians, short-solution instances, and the decoding drivers built on them.

Integers cross the boundary as python ints, rationals as "p/q" strings,
matrices as row-major nested lists.
"""

try:
    from ._latsnf import *  # noqa: F401,F403
    from ._latsnf import __version__  # noqa: F401
except ImportError:  # uninstalled build tree: module sits next to the package
    from _latsnf import *  # noqa: F401,F403
    from _latsnf import __version__  # noqa: F401
