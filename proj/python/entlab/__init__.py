"""Dense numerical laboratory for entanglement rates and area-law stability.

Thin python face over the C++ core: operators and entropies, seeded sampling,
commutator ratio scans, mixing/entangling rates with a state optimizer, torus
lattices and Hamiltonian presets, light-cone bound checks, and ground-state
transport along gapped paths.
"""

try:
    from ._entlab import *  # noqa: F401,F403  (installed layout)
    from ._entlab import __doc__ as _core_doc  # noqa: F401
except ImportError:  # pragma: no cover - build-tree layout
    from _entlab import *  # noqa: F401,F403

__version__ = "0.1.0"
