"""Kernel backend selection: compiled Cython extension with numpy fallback.

The active backend is chosen once at import. Set MYOPIC_BACKEND=python to
force the fallback (useful for benchmarking and debugging); any other value
of the variable requires the compiled extension and fails loudly if missing.
"""

from __future__ import annotations

import os

from . import _kernels_py

_forced = os.environ.get("MYOPIC_BACKEND", "").strip().lower()

if _forced == "python":
    _impl = _kernels_py
elif _forced in ("", "auto"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py
elif _forced == "compiled":
    from . import _kernels as _impl  # type: ignore[no-redef]
else:
    raise RuntimeError(f"MYOPIC_BACKEND must be 'python', 'compiled' or 'auto', got {_forced!r}")

BACKEND = _impl.BACKEND_NAME
TOUCHDOWN_SD_TOL = _impl.TOUCHDOWN_SD_TOL

rk4_double_integrator = _impl.rk4_double_integrator
rk4_asteroid = _impl.rk4_asteroid
touchdown_scan = _impl.touchdown_scan
