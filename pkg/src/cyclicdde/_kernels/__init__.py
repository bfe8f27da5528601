"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; the pure-Python
reference implementation is the fallback.  Set ``CYCLICDDE_PURE_PYTHON=1`` to
force the fallback (used by the backend-agreement tests and the benchmark).
"""

import os

if os.environ.get("CYCLICDDE_PURE_PYTHON", "") not in ("", "0"):
    from cyclicdde._kernels import _ref as _impl

    BACKEND = "python"
else:
    try:
        from cyclicdde._kernels import _speed as _impl

        BACKEND = "compiled"
    except ImportError:
        from cyclicdde._kernels import _ref as _impl

        BACKEND = "python"

run_loop_rk4 = _impl.run_loop_rk4
run_gene_rk4 = _impl.run_gene_rk4
