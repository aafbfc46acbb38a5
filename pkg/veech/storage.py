import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from veech.config import TOOL_VERSION, debug_print
from veech.errors import InvalidQueryError
from veech.exactnum import CycloElem, canonicalize
from veech.monitoring import StageMonitor
from veech.search import RootTuple
from veech.utils import format_fraction, parse_fraction

SCHEMA_VERSION = 1
TIMINGS_SUFFIX = ".timings.json"

Table = Tuple[Sequence[str], List[Sequence[Any]]]


def to_jsonable(value: Any) -> Any:
    """Plain JSON data; rationals become "num/den" strings and never floats"""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Fraction):
        return format_fraction(value)
    if isinstance(value, CycloElem):
        return {"modulus": value.modulus, "coeffs": [format_fraction(c) for c in value.coeffs]}
    if isinstance(value, RootTuple):
        return {"n": value.n, "roots": [[value.n, e] for e in value.exponents]}
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [to_jsonable(v) for v in items]
    raise TypeError(f"cannot serialize {type(value).__name__}")


def decode_elem(data: Dict[str, Any]) -> CycloElem:
    coeffs = [parse_fraction(c) for c in data["coeffs"]]
    return canonicalize(data["modulus"], dict(enumerate(coeffs)))


def _cell(value: Any) -> str:
    if isinstance(value, Fraction):
        return format_fraction(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (list, tuple)):
        return " ".join(_cell(v) for v in value)
    return str(value)


@dataclass
class Report:
    """Everything one command emits; timings are kept out so the payload stays deterministic"""
    command: str
    payload: Dict[str, Any]
    tables: Dict[str, Table] = field(default_factory=dict)
    lines: List[str] = field(default_factory=list)

    def to_json(self, config_echo: Optional[Dict[str, Any]] = None) -> str:
        document = {
            "schema": SCHEMA_VERSION,
            "tool_version": TOOL_VERSION,
            "command": self.command,
            "config": config_echo or {},
            **to_jsonable(self.payload),
        }
        return json.dumps(document, indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        for name in sorted(self.tables):
            columns, rows = self.tables[name]
            writer.writerow(["table", *columns])
            for row in rows:
                writer.writerow([name, *(_cell(v) for v in row)])
        return buffer.getvalue()

    def to_text(self) -> str:
        out = [f"{self.command}"]
        out.extend(self.lines)
        for name in sorted(self.tables):
            columns, rows = self.tables[name]
            out.append(f"{name} ({len(rows)} rows)")
            out.append("  " + " | ".join(columns))
            out.extend("  " + " | ".join(_cell(v) for v in row) for row in rows)
        return "\n".join(out) + "\n"

    def render(self, fmt: str, config_echo: Optional[Dict[str, Any]] = None) -> str:
        if fmt == "json":
            return self.to_json(config_echo)
        if fmt == "csv":
            return self.to_csv()
        if fmt == "text":
            return self.to_text()
        raise InvalidQueryError(f"unknown format {fmt!r}")


def write_report(report: Report, fmt: str, path: str = "",
                 config_echo: Optional[Dict[str, Any]] = None) -> bool:
    """Write to path, or to stdout when path is empty"""
    text = report.render(fmt, config_echo)
    if not path:
        sys.stdout.write(text)
        return True
    try:
        with open(path, "w", newline="") as f:
            f.write(text)
        debug_print(f"[DEBUG] write_report - wrote {report.command} report to {path}")
        return True
    except IOError as e:
        print(f"[ERROR] Error saving report to {path}: {e}", file=sys.stderr)
        return False


def load_report(path: str) -> Dict[str, Any]:
    """Read a JSON report back; returns {} when the file is missing or unreadable"""
    data: Dict[str, Any] = {}
    if os.path.exists(path):
        try:
            with open(path, "r") as f:
                data = json.load(f)
                debug_print(f"[DEBUG] load_report - loaded {data.get('command')} report from {path}")
        except (json.JSONDecodeError, IOError) as e:
            print(f"[ERROR] Error loading report from {path}: {e}", file=sys.stderr)
            return {}
    if data and data.get("schema") != SCHEMA_VERSION:
        print(f"[ERROR] Unsupported report schema {data.get('schema')!r} in {path}", file=sys.stderr)
        return {}
    return data


def save_timings(monitor: StageMonitor, path: str) -> Optional[str]:
    """Sidecar next to the report; nothing is written when the report goes to stdout"""
    if not path:
        return None
    sidecar = path + TIMINGS_SUFFIX
    monitor.save(sidecar)
    return sidecar
