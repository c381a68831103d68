"""fracosc: fractional-order calculus and higher-order osculator-bundle geometry.

Layers, bottom to top:

* :mod:`fracosc.specfun`      -- gamma / generalized binomial / Mittag-Leffler
* :mod:`fracosc.series`       -- exact calculus on fractional-power series
* :mod:`fracosc.expr`         -- small expression language + fractional partials
* :mod:`fracosc.numeric`      -- Grunwald-Letnikov / L1 schemes, fractional ODE solver
* :mod:`fracosc.geometry`     -- charts, fractional Jacobians, fractional exterior calculus
* :mod:`fracosc.bundle`       -- k-order fractional jet bundle: dilation fields, tangent
                                 structure, sprays, nonlinear connections, adapted frames
* :mod:`fracosc.connection`   -- metrical connection, covariant derivative, metric lift
* :mod:`fracosc.lagrange`     -- fractional variational calculus and prolongations
* :mod:`fracosc.cli`          -- command-line front end (`fracosc <subcommand>`)
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    AccuracyError,
    DomainError,
    EvalError,
    FracoscError,
    ParseError,
    SingularityError,
)
from .series import FracSeries, frac_derive  # noqa: F401
from .specfun import gamma, gen_binomial, mittag_leffler  # noqa: F401
