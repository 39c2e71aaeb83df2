"""Kernel selection.

The compiled extension is used when it was built; otherwise the pure-Python
implementation is used.  Setting ``TREELOCAL_PURE=1`` forces the fallback.
"""

import os

from . import _kernel_py

BACKEND = "python"
closure = _kernel_py.closure
mult_table = _kernel_py.mult_table
table_closure = _kernel_py.table_closure

if os.environ.get("TREELOCAL_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernel_cy
    except ImportError:  # extension not built
        pass
    else:
        BACKEND = "cython"
        closure = _kernel_cy.closure
        mult_table = _kernel_cy.mult_table
        table_closure = _kernel_cy.table_closure


def backends():
    """Map backend name to its module, for benchmarks and cross-checks."""
    out = {"python": _kernel_py}
    try:
        from . import _kernel_cy
    except ImportError:
        return out
    out["cython"] = _kernel_cy
    return out
