import asyncio
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from typing import Any, Callable, Dict, Iterator, List, Sequence

from veech.config import debug_print


class StageMonitor:
    """Wall-clock timings and search-space sizes for one CLI run"""

    def __init__(self, run_name: str):
        self.run_name = run_name
        self.timings: Dict[str, float] = {}
        self.sizes: Dict[str, int] = {}

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        start = time.perf_counter()
        debug_print(f"[DEBUG] StageMonitor.stage - entering {name}")
        try:
            yield
        finally:
            elapsed = time.perf_counter() - start
            self.timings[name] = self.timings.get(name, 0.0) + elapsed
            print(f"[STAGE] {name}: {elapsed:.2f}s", file=sys.stderr)

    def record_size(self, name: str, size: int) -> None:
        self.sizes[name] = size
        print(f"[STAGE] {name}: {size} items", file=sys.stderr)

    def to_dict(self) -> Dict[str, Any]:
        return {"run": self.run_name, "timings": self.timings, "sizes": self.sizes}

    def save(self, path: str) -> None:
        """Timings live in a sidecar file so the report itself stays deterministic"""
        try:
            with open(path, "w") as f:
                json.dump(self.to_dict(), f, indent=2, sort_keys=True)
        except IOError as e:
            print(f"[ERROR] Error saving timings to {path}: {e}", file=sys.stderr)


async def gather_parallel(fn: Callable[[Any], Any], items: Sequence[Any], workers: int) -> List[Any]:
    """Apply fn to every work item; results come back in item order"""
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    loop = asyncio.get_running_loop()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        tasks = [loop.run_in_executor(pool, fn, item) for item in items]
        return list(await asyncio.gather(*tasks))
