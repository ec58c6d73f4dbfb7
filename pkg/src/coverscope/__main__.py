import sys

from coverscope.cli import main

__all__ = ["main"]


# test with: python -m coverscope
if __name__ == "__main__":
    sys.exit(main())
