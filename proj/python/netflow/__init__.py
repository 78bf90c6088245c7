"""Transport flows on networks with time-periodic weights."""

from ._netflow import (
    Expr,
    GraphError,
    HypothesisError,
    NetworkGraph,
    ParseError,
    Scenario,
    ScenarioError,
    build_graph,
    cyclic_index,
    is_strongly_connected,
    load_scenario,
    parse_expr,
    parse_scenario,
    peripheral_count,
)

__all__ = [
    "Expr",
    "GraphError",
    "HypothesisError",
    "NetworkGraph",
    "ParseError",
    "Scenario",
    "ScenarioError",
    "build_graph",
    "cyclic_index",
    "is_strongly_connected",
    "load_scenario",
    "parse_expr",
    "parse_scenario",
    "peripheral_count",
]
