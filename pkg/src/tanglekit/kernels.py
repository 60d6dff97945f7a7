"""Hot kernels: the compiled extension when built, pure Python otherwise.

Set ``TANGLEKIT_PURE=1`` to force the pure-Python versions.
"""
import os

from . import _kernels_py

BACKEND = "python"
tl_stack = _kernels_py.tl_stack
eval_grid = _kernels_py.eval_grid
# compiled fast paths for tangle validation, composition and canonical form;
# None means tangle.py uses its own (reference) Python code throughout
tangle_core = None

if os.environ.get("TANGLEKIT_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        tl_stack = _compiled.tl_stack
        eval_grid = _compiled.eval_grid
    try:
        from . import _tanglecore as tangle_core
    except ImportError:
        tangle_core = None

__all__ = ["BACKEND", "tl_stack", "eval_grid", "tangle_core"]
