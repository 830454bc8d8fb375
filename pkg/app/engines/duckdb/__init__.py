from .client import Datastore
from .describe import schema_description
from .models import ColumnSchema, ColumnType, SqlResult, Table, TableSchema
from .operators import AnomalyReport, TrendReport, describe_trend, detect_anomaly
from .relationalize import build_datastore
from .sql import execute_sql

__all__ = [
    "AnomalyReport",
    "ColumnSchema",
    "ColumnType",
    "Datastore",
    "SqlResult",
    "Table",
    "TableSchema",
    "TrendReport",
    "build_datastore",
    "describe_trend",
    "detect_anomaly",
    "execute_sql",
    "schema_description",
]
