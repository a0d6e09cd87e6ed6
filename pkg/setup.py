import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = []
if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "swarm_bench.kernels._core",
                ["src/swarm_bench/kernels/_core.pyx"],
                include_dirs=[np.get_include()],
                # -ffp-contract=off: the pure-Python fallback must produce
                # bit-identical doubles, so no FMA contraction.
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=extensions)
