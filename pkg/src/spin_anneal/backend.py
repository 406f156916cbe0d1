"""Kernel backend selection.

The compiled extension (spin_anneal._kernels) is used when it was built;
otherwise the pure-numpy fallback (spin_anneal.kernels_py) takes over.  The
environment variable SPIN_ANNEAL_KERNELS forces the choice: "c" demands the
compiled backend (ImportError if missing), "py" forces the fallback.

Both backends integrate the same equations with the same stage structure;
they are not guaranteed to agree bitwise because summation order inside
matrix products differs.  Results are reproducible within one backend, and
every run manifest records which backend produced it.
"""

from __future__ import annotations

import os

from . import kernels_py

_choice = os.environ.get("SPIN_ANNEAL_KERNELS", "").strip().lower()

if _choice == "py":
    _impl = kernels_py
elif _choice == "c":
    from . import _kernels as _impl  # noqa: F401
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = kernels_py


def active() -> str:
    """Name of the kernel backend in use: 'compiled' or 'python'."""
    return "compiled" if _impl.COMPILED else "python"


visa_integrate = _impl.visa_integrate
cim_integrate = _impl.cim_integrate
meht_integrate = _impl.meht_integrate
svl_integrate = _impl.svl_integrate
