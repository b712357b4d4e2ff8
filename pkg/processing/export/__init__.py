"""Export modules for TSV and JSON outputs."""

from processing.export.json_writer import JSONExportConfig, JSONWriter, read_json
from processing.export.tsv_writer import TSVExportConfig, TSVWriter

__all__ = ["JSONExportConfig", "JSONWriter", "TSVExportConfig", "TSVWriter", "read_json"]
