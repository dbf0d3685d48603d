"""mollab: a numerical laboratory for mollified moments of Dirichlet
L-functions at the central point.

Core surface:

  poly         exact polynomial arithmetic
  functionals  main-term functionals s1, s2 and the quadratic model
  optimizer    Rayleigh-quotient maximization of the proportion
  kernels      smoothed cutoff kernels V, V1, F by contour quadrature
  characters   Dirichlet characters, Gauss sums, orthogonality
  lfunctions   central values and mollifier values per character
  moments      averaged moment sweeps and the non-vanishing census
  kloosterman  complete exponential sums and trilinear forms
  service      FastAPI wrapper; cli is a thin client of the same handlers
"""

__version__ = "0.1.0"

from .functionals import (  # noqa: F401
    MollifierSpec,
    QuadraticModel,
    assemble_quadratic_model,
    is_proportion,
    mv_proportion,
    proportion,
    reference_spec,
    s1_constant,
    s2_constant,
)
from .optimizer import maximize_rayleigh, reproduce_benchmark, scan_theta2  # noqa: F401
from .poly import Polynomial  # noqa: F401
