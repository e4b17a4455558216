from .feature_rows import read_feature_rows
from .flows import Dataset, FlowRecord, RowError, class_counts, dump_ndjson, parse_flow_csv, read_flow_files
from .schema import Column, FlowSchema, load_schema, parse_schema
from .split import derive_seeds, stratified_indices, stratified_split
from .synthetic import synthetic_flows

__all__ = [
    "Dataset", "FlowRecord", "RowError",
    "parse_flow_csv", "read_flow_files", "class_counts", "dump_ndjson", "read_feature_rows",
    "Column", "FlowSchema", "load_schema", "parse_schema",
    "stratified_split", "stratified_indices", "derive_seeds",
    "synthetic_flows",
]
