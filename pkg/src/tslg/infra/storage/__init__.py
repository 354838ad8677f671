from .events import EVENT_COLUMNS, read_events_csv, write_events_csv  # noqa: F401
from .libraries import load_library, save_library  # noqa: F401
from .manifest import (  # noqa: F401
    FileDigest,
    RunManifest,
    compare_outputs,
    manifest_path,
    read_manifest,
    sha256_file,
    write_manifest,
)
from .reports import write_report_json, write_rows_csv, write_trace_csv  # noqa: F401
