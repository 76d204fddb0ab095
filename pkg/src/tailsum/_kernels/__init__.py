"""Hot-loop kernels with a compiled core and a numpy fallback.

The compiled extension (Cython) is preferred when importable; set
``TAILSUM_KERNEL=numpy`` to force the fallback or ``TAILSUM_KERNEL=cython``
to make a missing extension an error.  Both backends implement the same
contracts and agree to floating-point rounding; estimates are reproducible
per backend.
"""

import os

_requested = os.environ.get("TAILSUM_KERNEL", "auto").lower()

if _requested not in ("auto", "cython", "numpy"):
    raise RuntimeError(
        f"TAILSUM_KERNEL must be 'auto', 'cython' or 'numpy', got {_requested!r}"
    )

if _requested in ("auto", "cython"):
    try:
        from . import _core as _impl
        BACKEND = "cython"
    except ImportError:
        if _requested == "cython":
            raise
        from . import _fallback as _impl
        BACKEND = "numpy"
else:
    from . import _fallback as _impl
    BACKEND = "numpy"

crude_chunk = _impl.crude_chunk
conditional_chunk = _impl.conditional_chunk


def available_backends() -> dict:
    """Importable kernel modules keyed by backend name."""
    from . import _fallback

    backends = {"numpy": _fallback}
    try:
        from . import _core

        backends["cython"] = _core
    except ImportError:
        pass
    return backends
