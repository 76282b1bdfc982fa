"""Select the compiled ascent kernel when it is built, else the numpy fallback.
``COHNONLOCAL_BACKEND=python`` forces the fallback."""
import os

if os.environ.get("COHNONLOCAL_BACKEND", "").lower() == "python":
    from . import _ascent_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _ascent as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _ascent_py as _impl

        BACKEND = "python"

evaluate = _impl.evaluate
ascend = _impl.ascend
