"""Modal mu-calculus model checking for pushdown systems by automaton saturation."""
from .ama import AMA, Denotation, Stats, from_json, to_dot, to_json
from .engine import IterationLimit, Options, allocate_states, model_check
from .mucalc import analyze, negate, parse_formula
from .pds import Configuration, PushdownSystem, config, parse_config, parse_pds, pre_index

__all__ = [
    "AMA", "Configuration", "Denotation", "IterationLimit", "Options", "PushdownSystem",
    "Stats", "allocate_states", "analyze", "config", "from_json", "model_check", "negate",
    "parse_config", "parse_formula", "parse_pds", "pre_index", "to_dot", "to_json",
]
