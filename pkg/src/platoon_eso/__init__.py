"""Observer-based cooperative adaptive cruise control for vehicle platoons.

Simulation, closed-loop stability certificates and string-stability analysis
for a string of third-order vehicles under a constant-time-headway spacing
policy, where each follower estimates its predecessor's acceleration with a
linear extended state observer.
"""

from .config import (
    ControllerGains,
    EsoGains,
    LeaderProfile,
    PlantParams,
    ScenarioConfig,
    SpacingPolicy,
    make_scenario,
    validate_config,
)
from .errors import (
    DegenerateRow,
    DenominatorVanishes,
    DivergenceDetected,
    EigenFailure,
    InvalidConfig,
    InvalidParameter,
    NotStable,
    PlatoonError,
    SingularAtOmega,
)
from .sim import MetricsReport, PlatoonTrajectory, metrics, simulate

__version__ = "0.1.0"
