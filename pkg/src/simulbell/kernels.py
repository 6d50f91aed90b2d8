"""Backend selection for the hot kernels.

The compiled ``_ckernels`` module is used when it was built; otherwise the
numpy implementations in ``_pykernels`` are used. ``use_backend`` switches at
runtime (benchmarks and the backend-equivalence tests rely on it).
"""
from . import _pykernels

try:
    from . import _ckernels
except ImportError:
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels

_active = _ckernels if _ckernels is not None else _pykernels


def backend_name() -> str:
    return "cython" if _active is _ckernels and _ckernels is not None else "python"


def use_backend(name: str) -> None:
    global _active
    try:
        _active = BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None


def transform_amplitudes(amps, unitaries):
    return _active.transform_amplitudes(amps, unitaries)


def uniqueness_tables(probs, n, d):
    return _active.uniqueness_tables(probs, n, d)
