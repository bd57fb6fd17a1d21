"""app.env_loader

Loads runtime settings (VERIFY_*) from a .env file using python-dotenv.

Lookup order: explicit path, then $VERIFY_ENV_FILE, then the nearest .env
walking upward from the current directory. Already-set variables win unless
`override` is passed. Nothing loaded here may change verification results.
"""

from __future__ import annotations

import os
from pathlib import Path

from dotenv import load_dotenv


def find_env_file(start: Path, max_levels: int = 6) -> Path | None:
    """Search upward for a .env file starting from `start`."""
    cur = start.resolve()
    for _ in range(max_levels + 1):
        if (cur / ".env").is_file():
            return cur / ".env"
        if cur.parent == cur:
            return None
        cur = cur.parent
    return None


def load_env(dotenv_path: str | None = None, override: bool = False) -> str | None:
    """Load VERIFY_* settings; returns the file used or None."""
    explicit = dotenv_path or os.getenv("VERIFY_ENV_FILE")
    if explicit:
        path = Path(explicit).expanduser()
        if not path.is_file():
            return None
    else:
        path = find_env_file(Path.cwd())
        if path is None:
            return None

    load_dotenv(dotenv_path=str(path), override=override)
    return str(path)
