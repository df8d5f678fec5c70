"""Dynamic equations on fibred configuration spaces, dynamic connections on
the affine jet bundle, and their geodesic lifts to the tangent bundle."""

from _jetflow import (
    ChartTransform,
    DimensionMismatchError,
    DomainError,
    DynamicConnection,
    DynamicEquation,
    ExpressionParseError,
    ReferenceFrame,
    ScalarField,
    TangentConnection,
    UnknownSymbolError,
    connection_difference,
    connection_from_sode,
    equation_difference,
    geodesic_deviation,
    integrate_sode,
    is_free_motion_candidate,
    lagrange_sode,
    lift_to_tangent,
    relative_acceleration,
    relativize,
    resymmetrize,
    run_scenario,
    sode_from_connection,
    transform_connection,
    transform_sode,
    vhat_oracle,
)

__all__ = [
    "ChartTransform",
    "DimensionMismatchError",
    "DomainError",
    "DynamicConnection",
    "DynamicEquation",
    "ExpressionParseError",
    "ReferenceFrame",
    "ScalarField",
    "TangentConnection",
    "UnknownSymbolError",
    "connection_difference",
    "connection_from_sode",
    "equation_difference",
    "geodesic_deviation",
    "integrate_sode",
    "is_free_motion_candidate",
    "lagrange_sode",
    "lift_to_tangent",
    "relative_acceleration",
    "relativize",
    "resymmetrize",
    "run_scenario",
    "sode_from_connection",
    "transform_connection",
    "transform_sode",
    "vhat_oracle",
]
