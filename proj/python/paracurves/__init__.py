"""Distinguished curves in parabolic geometries."""

import json

from ._paracurves import (
    Error,
    DomainError,
    Metric,
    NumericalBreakdown,
    PreconditionError,
    SchemaError,
    __version__,
    catalog_names,
    conformal_circle,
    cr_einstein,
    einstein_check,
    geodesic,
    legendrean_einstein,
    run_acceptance,
    run_command,
)


def run(command, config, **kwargs):
    """Run a CLI command on a config (dict or JSON text); returns (exit_code, report dict)."""
    text = config if isinstance(config, str) else json.dumps(config)
    code, report = run_command(command, text, **kwargs)
    return code, json.loads(report)


def symalg(geometry, n, **extra):
    """Symmetry-algebra report for the model curve of the given geometry."""
    code, report = run("symalg", dict(geometry=geometry, n=n, **extra))
    if code == 2:
        raise PreconditionError(report["error"]["message"])
    return report["payload"]
