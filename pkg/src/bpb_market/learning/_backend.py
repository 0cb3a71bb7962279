"""Pick the round kernel at import: the compiled one when it was built, the
pure-Python twin otherwise or when BPB_MARKET_PURE is set."""
import os

from . import _kernel_py

kernel = _kernel_py
NAME = "python"
if not os.environ.get("BPB_MARKET_PURE"):
    try:
        from . import _kernel as kernel  # noqa: F811
        NAME = "cython"
    except ImportError:
        pass


def get(name=None):
    """Return (module, name) for an explicit backend or the default one."""
    if name in (None, NAME):
        return kernel, NAME
    if name == "python":
        return _kernel_py, "python"
    if name == "cython":
        from . import _kernel
        return _kernel, "cython"
    raise ValueError(f"unknown backend {name!r}")
