import asyncio
import sys

from veech.cli import run
from veech.config import DEV_MODE, TOOL_VERSION, debug_print


async def main() -> int:
    print(f"✅ veech {TOOL_VERSION} running in {'development' if DEV_MODE else 'production'} mode", file=sys.stderr)
    if DEV_MODE:
        debug_print("DEBUG logging is enabled - detailed logs will be displayed")
    return await run(sys.argv[1:])

if __name__ == "__main__":
    sys.exit(asyncio.run(main()))
