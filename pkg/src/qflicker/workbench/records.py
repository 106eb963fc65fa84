"""Run records: everything needed to re-run a command and check its outputs."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from .. import __version__
from ..errors import InputError

RECORD_VERSION = 1


@dataclass
class RunRecord:
    command: str
    argv: list
    outputs: dict
    resolved_inputs: dict = field(default_factory=dict)
    descriptor: Optional[dict] = None
    descriptor_base: Optional[str] = None
    warnings: list = field(default_factory=list)
    seed: Optional[int] = None
    constants: str = "codata"
    tool_version: str = __version__
    record_version: int = RECORD_VERSION
    created: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds")
    )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(asdict(self), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "RunRecord":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read run record {path}: {exc}") from None
        if data.get("record_version") != RECORD_VERSION:
            raise InputError(f"unsupported run record version {data.get('record_version')!r}")
        known = set(cls.__dataclass_fields__)
        return cls(**{k: v for k, v in data.items() if k in known})
