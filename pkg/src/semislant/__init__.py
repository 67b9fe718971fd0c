"""Numerical verification of semi-slant submersions from Sasakian manifolds."""

__version__ = "0.1.0"

from .checks import FAIL, FINDING, PASS, CheckEntry, all_specs  # noqa: E402
from .contact import AS_PRINTED, CORRECTED, standard_sasakian  # noqa: E402
from .diffgeo import FDConfig, MetricField, VectorField  # noqa: E402
from .examples import EXAMPLES, affine_setup, registry_example  # noqa: E402
from .report import ConfigError, RunConfig, VerificationReport, emit_report, run_suite  # noqa: E402
from .semislant import detect_semi_slant  # noqa: E402
from .submersion import AffineMap, SmoothMap, SubmersionSetup  # noqa: E402

__all__ = [
    "__version__", "PASS", "FAIL", "FINDING", "CheckEntry", "all_specs", "AS_PRINTED", "CORRECTED",
    "standard_sasakian", "FDConfig", "MetricField", "VectorField", "EXAMPLES", "affine_setup",
    "registry_example", "ConfigError", "RunConfig", "VerificationReport", "emit_report", "run_suite",
    "detect_semi_slant", "AffineMap", "SmoothMap", "SubmersionSetup",
]
