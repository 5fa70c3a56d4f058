"""Two-photon correlation simulations: Fresnel propagation of SPDC pairs."""

try:
    from . import _biphoton as _core  # installed wheel layout
except ImportError:  # build-tree layout: extension on PYTHONPATH
    import _biphoton as _core

__version__ = _core.__version__

bessel_j1 = _core.bessel_j1
evaluate_inequalities = _core.evaluate_inequalities
free_propagate = _core.free_propagate
gaussian_phase = _core.gaussian_phase
list_scenarios = _core.list_scenarios
run_scenario = _core.run_scenario
sample_pairs = _core.sample_pairs
somb = _core.somb
subsystem_entropy = _core.subsystem_entropy
temporal_g2 = _core.temporal_g2

GeometryError = _core.GeometryError
SamplingViolationError = _core.SamplingViolationError
ScenarioConfigError = _core.ScenarioConfigError

__all__ = [
    "__version__",
    "bessel_j1",
    "evaluate_inequalities",
    "free_propagate",
    "gaussian_phase",
    "list_scenarios",
    "run_scenario",
    "sample_pairs",
    "somb",
    "subsystem_entropy",
    "temporal_g2",
    "GeometryError",
    "SamplingViolationError",
    "ScenarioConfigError",
]
