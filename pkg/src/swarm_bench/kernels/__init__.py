"""Kernel backend selection.

The compiled extension is preferred; the pure-Python module is the
fallback. Set SWARM_BENCH_PURE=1 to force the fallback (used by the
parity tests and the kernel benchmark). Both backends are bit-identical,
so results never depend on which one loaded.
"""

import os

from . import pure

if os.environ.get("SWARM_BENCH_PURE"):
    impl = pure
else:
    try:
        from . import _core as impl  # type: ignore[no-redef]
    except ImportError:
        impl = pure

BACKEND = impl.BACKEND

trace_beam = impl.trace_beam
scan_integrate = impl.scan_integrate
count_gain = impl.count_gain
astar = impl.astar
range_confidence = impl.range_confidence


def compiled_available() -> bool:
    try:
        from . import _core  # noqa: F401
    except ImportError:
        return False
    return True
