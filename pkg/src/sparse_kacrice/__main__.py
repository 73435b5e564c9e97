"""Allow running the command-line interface via ``python -m sparse_kacrice``."""

from .cli import console_main

if __name__ == "__main__":
    console_main()
