"""
🖥️ Console and logging helpers
==============================

Human-readable output goes to standard error through a rich console; JSON
reports own standard output.
"""

from typing import Optional

import coloredlogs
from rich.console import Console

console = Console(stderr=True, highlight=False)

_FORMAT = "%(asctime)s %(name)s %(levelname)s %(message)s"


def setup_logging(level: Optional[str] = None) -> None:
    """Install coloured logging on standard error"""
    from utils.config import get_settings

    coloredlogs.install(level=level or get_settings().log_level, fmt=_FORMAT)


def success(message: str) -> None:
    console.print(f"✅ {message}")


def warning(message: str) -> None:
    console.print(f"⚠️ {message}", style="yellow")


def failure(message: str) -> None:
    console.print(f"❌ {message}", style="red")


def info(message: str) -> None:
    console.print(f"🔍 {message}")


def report(message: str) -> None:
    console.print(f"📊 {message}")
