"""Entry point for ``python -m noma_relay``."""

from .cli import main

if __name__ == "__main__":
    raise SystemExit(main())
