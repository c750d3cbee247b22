from __future__ import annotations


def main():
    import sys

    from .._src.cli import main as cli_main

    sys.exit(cli_main())


if __name__ == "__main__":
    main()
