"""Hot phase-summation kernels.

The compiled extension (``_ext``, Cython) does Kahan-compensated
accumulation with exact fma-based phase reduction; the numpy fallback
(``_fallback``) uses pairwise summation and long-double phase reduction.
Both expose the same API and agree to ~1e-12 at desk scale.  Set
FPL_FORCE_FALLBACK=1 to skip the extension.
"""

import os

if os.environ.get("FPL_FORCE_FALLBACK"):
    from fplab.kernels._fallback import BACKEND, phase_sum, phase_sum_grid
else:
    try:
        from fplab.kernels._ext import phase_sum, phase_sum_grid

        BACKEND = "cython"
    except ImportError:  # extension not built; numpy path is fully capable
        from fplab.kernels._fallback import BACKEND, phase_sum, phase_sum_grid

__all__ = ["phase_sum", "phase_sum_grid", "BACKEND"]
