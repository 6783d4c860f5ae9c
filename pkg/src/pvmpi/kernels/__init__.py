"""Backend dispatch for the numeric hot loops.

The numba-compiled kernels are used by default; set the environment
variable ``PVMPI_DISABLE_NUMBA=1`` (before import) to force the pure
numpy/scipy fallback.  ``BACKEND`` records which one is active.
``benchmarks/bench_kernels.py`` times the two side by side.
"""

import os

_flag = os.environ.get("PVMPI_DISABLE_NUMBA", "").strip().lower()
_disabled = _flag in {"1", "true", "yes"}

if _disabled:
    from . import _np as _impl
    BACKEND = "numpy"
else:
    try:
        from . import _nb as _impl
        BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba present in normal installs
        from . import _np as _impl
        BACKEND = "numpy"

CLIP = _impl.CLIP

norm_cdf = _impl.norm_cdf
norm_ppf = _impl.norm_ppf

gauss_logpdf = _impl.gauss_logpdf
gauss_hfunc = _impl.gauss_hfunc
gauss_hinv = _impl.gauss_hinv
clayton_logpdf = _impl.clayton_logpdf
clayton_hfunc = _impl.clayton_hfunc
clayton_hinv = _impl.clayton_hinv
gumbel_logpdf = _impl.gumbel_logpdf
gumbel_hfunc = _impl.gumbel_hfunc
gumbel_hinv = _impl.gumbel_hinv
frank_logpdf = _impl.frank_logpdf
frank_hfunc = _impl.frank_hfunc
frank_hinv = _impl.frank_hinv

kendall_tau = _impl.kendall_tau
energy_score = _impl.energy_score
vario_pair_means = _impl.vario_pair_means
coverage_fraction = _impl.coverage_fraction
