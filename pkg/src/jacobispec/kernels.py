"""Hot-kernel dispatch: compiled extension if available, numpy otherwise.

Set JACOBISPEC_PURE=1 to force the numpy fallback (used by the kernel
parity tests and the benchmark). ``backend`` names the selected path.
"""

import os

if os.environ.get("JACOBISPEC_PURE", "") == "1":
    from . import _kernels_py as _impl

    backend = "python"
else:
    try:
        from . import _kernels_cy as _impl

        backend = "cython"
    except ImportError:
        from . import _kernels_py as _impl

        backend = "python"

disc_batch = _impl.disc_batch
monodromy_batch = _impl.monodromy_batch
monodromy_with_derivative = _impl.monodromy_with_derivative
symmetric_eigenvalues = _impl.symmetric_eigenvalues
