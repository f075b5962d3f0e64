"""Kernel backend selection: compiled extension when available, else pure python.

Set NEARCRIT_PURE=1 to force the pure backend.  Both backends are written to
produce bit-identical outputs; ``backend_name()`` reports which one is live.
"""

import os

from . import pure

if os.environ.get("NEARCRIT_PURE"):
    _impl = pure
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pure

peel_two_core = _impl.peel_two_core
bfs_fill = _impl.bfs_fill
bfs_distances = _impl.bfs_distances
eccentricity = _impl.eccentricity
connected_labels = _impl.connected_labels
forest_from_roots = _impl.forest_from_roots
cola_drain = _impl.cola_drain

DRAIN_STACK_EMPTY = pure.DRAIN_STACK_EMPTY
DRAIN_BOUNDARY = pure.DRAIN_BOUNDARY
DRAIN_STUCK = pure.DRAIN_STUCK


def backend_name() -> str:
    return _impl.BACKEND
