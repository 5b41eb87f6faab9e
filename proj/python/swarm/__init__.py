"""Python interface to the swarm integration core."""

from ._swarm import (
    BackendError,
    BackendUnavailable,
    Error,
    Interval,
    OutOfRange,
    SchemaError,
    Simulation,
    SyntaxError,
    System,
    UnboundIdentifier,
    UnknownParameter,
    ValidationError,
    backend_available,
    bench_json,
    builtin,
    emit_kernel_source,
    eval_expression,
    find_branch_constructs,
    lift_parameter,
    load_system,
    parse_expression,
    reference_step,
    save_system,
    validate,
    with_particle_count,
)

__all__ = [name for name in dir() if not name.startswith("_")]
