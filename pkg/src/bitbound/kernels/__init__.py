"""Kernel selection: the compiled core when importable, else numpy.

Set ``BITBOUND_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _fallback as fallback

compiled = None
if os.environ.get("BITBOUND_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _core as compiled  # type: ignore[no-redef]
    except ImportError:
        compiled = None

active = compiled if compiled is not None else fallback
BACKEND = "compiled" if compiled is not None else "numpy"

eval_bits = active.eval_bits
eval_planes = active.eval_planes
sweep = active.sweep


def use(name: str) -> None:
    """Switch backends at runtime (``"compiled"`` or ``"numpy"``)."""
    global active, BACKEND, eval_bits, eval_planes, sweep
    if name == "compiled":
        if compiled is None:
            raise RuntimeError("compiled kernels are not built")
        active = compiled
    elif name == "numpy":
        active = fallback
    else:
        raise ValueError(name)
    BACKEND = name
    eval_bits, eval_planes, sweep = active.eval_bits, active.eval_planes, active.sweep
