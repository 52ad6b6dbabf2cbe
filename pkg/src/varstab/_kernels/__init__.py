"""Kernel backend selection.

The hot loops (tape evaluation, RK4 stepping) exist twice: a Cython
extension (``varstab._kernels._core``) and a pure-Python reference
(``varstab._kernels._pykernels``).  The compiled core is preferred when it
imported successfully; set ``VARSTAB_PURE=1`` to force the fallback (the
benchmark and the backend-equivalence tests do this).
"""

import os

from . import _pykernels

if os.environ.get("VARSTAB_PURE"):
    _impl = _pykernels
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.BACKEND

STATUS_OK = _pykernels.STATUS_OK
STATUS_LEFT_INTERVAL = _pykernels.STATUS_LEFT_INTERVAL
STATUS_NONFINITE = _pykernels.STATUS_NONFINITE

make_tape_fn = _impl.make_tape_fn
make_htable_fn = _impl.make_htable_fn
make_u2_context = _impl.make_u2_context
jet_many = _impl.jet_many
val_many = _impl.val_many
rk4_full = _impl.rk4_full
rk4_reduced = _impl.rk4_reduced


def get_backend(name=None):
    """Return the kernel module for *name* ('python', 'cython' or None=active)."""
    if name in (None, BACKEND):
        return _impl
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _core
        return _core
    raise ValueError(f"unknown backend {name!r}")
