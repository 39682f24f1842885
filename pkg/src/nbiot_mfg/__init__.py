"""Mean-field uplink power allocation for ultra-dense NB-IoT networks.

Subpackages cover the NB-IoT transport model (phy), the stochastic
geometry of the deployment (spatial), traffic aggregation (traffic), the
stationary mean-field equilibrium solver (solver), link-level metrics
(link), Monte-Carlo validation (mc) and the experiment harness
(config, experiments, cli).
"""

__version__ = "0.1.0"

from . import _kernels

kernel_backend = _kernels.backend_name
