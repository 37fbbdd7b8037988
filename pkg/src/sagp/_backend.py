"""Pick the compiled kernel extension when it is importable.

``kernels`` is the active module; ``use("python")`` or ``use("compiled")``
switches it at runtime, mainly for the benchmark and the parity tests.
"""

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

kernels = _compiled if _compiled is not None else _kernels_py


def available():
    names = ["python"]
    if _compiled is not None:
        names.append("compiled")
    return names


def use(name):
    global kernels
    if name == "python":
        kernels = _kernels_py
    elif name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built; run `pip install -e .`")
        kernels = _compiled
    else:
        raise ValueError(f"unknown backend {name!r}")
    return kernels


def current():
    return kernels.BACKEND
