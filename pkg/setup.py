"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension: ``filtra._kernels``
falls back to the numpy implementation when ``filtra._kernels._native`` is
missing. Set FILTRA_SKIP_NATIVE=1 to skip the extension build entirely.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the extension if possible, warn and continue if not."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler or toolchain missing
            print(f"WARNING: skipping native kernels ({exc}); "
                  "falling back to pure-python kernels")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"WARNING: failed to build {ext.name} ({exc}); "
                  "falling back to pure-python kernels")


ext_modules = []
cmdclass = {}
if not os.environ.get("FILTRA_SKIP_NATIVE"):
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "filtra._kernels._native",
                    ["src/filtra/_kernels/_native.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
        cmdclass = {"build_ext": optional_build_ext}
    except ImportError:
        print("WARNING: Cython not available; building without native kernels")

setup(ext_modules=ext_modules, cmdclass=cmdclass)
