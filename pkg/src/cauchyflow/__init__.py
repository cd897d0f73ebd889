"""2D active-scalar transport with a Cauchy convolution kernel.

Subpackages are imported lazily so the CLI can configure the thread pool
before the JIT-compiled pairwise kernels load.
"""
__version__ = "0.1.0"

__all__ = ["complexfield", "vorticity", "dynamics", "flowdiag", "velform",
           "config", "runner", "report", "cli"]


def __getattr__(name):
    if name in __all__:
        import importlib
        return importlib.import_module("." + name, __name__)
    raise AttributeError(name)
