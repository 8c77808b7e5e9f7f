"""
kerrkit - Kerr coherent-state quantum kernels, verification suites and benchmarks
"""

__version__ = "1.0.0"
