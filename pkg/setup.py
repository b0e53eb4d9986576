"""Build script: compiles the scattering-scan extension when a toolchain is
available, otherwise installs pure Python (the package falls back to the
vectorized numpy kernels at import time)."""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "nfdmsim._kern._zs_cython",
                ["src/nfdmsim/_kern/_zs_cython.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-env dependent
    sys.stderr.write(f"nfdmsim: building without compiled kernels ({exc})\n")

setup(ext_modules=ext_modules)
