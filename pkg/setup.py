# Builds the optional compiled coverage kernels. The package works without
# them (pure-Python fallback); set DISP_SKIP_EXT=1 to skip compilation.
import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("DISP_SKIP_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "dispersion._fastcover",
                    ["src/dispersion/_fastcover.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
