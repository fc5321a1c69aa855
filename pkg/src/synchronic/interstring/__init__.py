from .algebra import Algebra, Operator, default_operators
from .dag import CellNode, DataflowView, to_dag
from .evaluate import EvaluationError, ensure_clean, evaluate, evaluate_as_tree
from .model import (
    DEFAULT_MAX_CELL_LEN,
    Interstring,
    InterstringParseError,
    format_interstring,
    is_identifier,
    is_literal,
    parse_interstring,
)
from .validate import (
    ARITY_MISMATCH,
    DUPLICATE_DESTINATION,
    MALFORMED_CELL,
    SAME_LAYER_READ,
    UNDEFINED_SOURCE,
    UNKNOWN_OPERATOR,
    Finding,
    ValidationReport,
    validate,
)

__all__ = [
    "ARITY_MISMATCH",
    "Algebra",
    "CellNode",
    "DEFAULT_MAX_CELL_LEN",
    "DUPLICATE_DESTINATION",
    "DataflowView",
    "EvaluationError",
    "Finding",
    "Interstring",
    "InterstringParseError",
    "MALFORMED_CELL",
    "Operator",
    "SAME_LAYER_READ",
    "UNDEFINED_SOURCE",
    "UNKNOWN_OPERATOR",
    "ValidationReport",
    "default_operators",
    "ensure_clean",
    "evaluate",
    "evaluate_as_tree",
    "format_interstring",
    "is_identifier",
    "is_literal",
    "parse_interstring",
    "to_dag",
    "validate",
]
