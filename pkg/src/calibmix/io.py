"""CSV/JSON output helpers shared by the library surface and the CLI.

Floats are rendered with full repr precision in both formats so that JSON
and CSV outputs of the same run carry identical numeric content.
"""

from __future__ import annotations

import csv
import io as _io
import json


def format_cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv_text(header, rows) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def payload_to_json_text(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def mapping_to_csv_text(mapping) -> str:
    """Flatten a nested JSON-style payload to key,value CSV rows."""
    rows = []

    def walk(prefix, obj):
        if isinstance(obj, dict):
            for k in sorted(obj):
                walk(f"{prefix}.{k}" if prefix else str(k), obj[k])
        elif isinstance(obj, (list, tuple)):
            for i, v in enumerate(obj):
                walk(f"{prefix}[{i}]", v)
        else:
            rows.append((prefix, format_cell(obj)))

    walk("", mapping)
    return rows_to_csv_text(("key", "value"), rows)


def write_text(path, text) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
