"""Join index for multi-document XML star-schema warehouses."""

from .errors import XJoinIndexError, DataError, UsageError
from .model import (
    DimensionDef,
    DimensionMember,
    FactCell,
    SchemaMeta,
    ValidationReport,
    Violation,
    Warehouse,
    empty_warehouse,
    lookup_member,
    validate,
)
from .join_index import IndexedCell, IndexedDimension, JoinIndex, build_index, index_stats
from .query import Query, Plan, parse_query, format_query, bind, rewrite_for_index, plan_join
from .executor import ResultTable, StepCounter, eval_no_index, eval_with_index, run_plan
from .cost import CostParams, e_index, e_noindex, gain, sweep

__version__ = "0.1.0"
