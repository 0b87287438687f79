"""Backend selection for the data-generation kernel.

The compiled extension is used when importable; set ``GOKUUI_PURE_PYTHON=1``
to force the numpy fallback.
"""
import os

from . import _slkernel_py

if os.environ.get("GOKUUI_PURE_PYTHON") == "1":
    _compiled = None
else:
    try:
        from . import _slkernel as _compiled
    except ImportError:
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"
sl_em_path = (_compiled or _slkernel_py).sl_em_path
sl_em_path_python = _slkernel_py.sl_em_path
sl_em_path_compiled = _compiled.sl_em_path if _compiled is not None else None
