from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("coverscope")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.0.0+unknown"
del version, PackageNotFoundError

__all__ = ["__version__"]
