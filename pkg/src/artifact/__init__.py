"""Transport-annihilation distances between discrete measures on spaces with boundary."""

from .annihilation import (
    w0,
    w0_nine_term,
    w0_rep_p1,
    w0_upper_estimate,
    w0_upper_rep,
    w_flat_upper,
    w_sharp_bounds,
)
from .charged import ChargedMeasure, charged_entropy, effective, entropy, lift, phi, psi, tilde_w, total
from .errors import (
    ArtifactError,
    ConfigurationError,
    InfiniteEntropyError,
    MassError,
    SolverError,
    SpaceMismatchError,
)
from .heat import (
    HeatSystem,
    apply_heat,
    apply_measure_flow,
    build_glued_system,
    build_interval_system,
    charged_flow,
    glued_direct_apply,
    glued_semigroup_apply,
)
from .kernels import BACKEND
from .measures import DiscreteMeasure, SignedMeasure, SubProbability
from .metric_space import GluedSpace, MetricSpace, cycle, from_points, glue, interval, validate_metric
from .transport import (
    TransportPlan,
    annihilation_cost,
    w_dagger,
    w_doubleprime,
    w_prime,
    w_prime_zero,
    w_star,
    wasserstein,
)

__version__ = "0.1.0"
