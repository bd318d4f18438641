"""Build script.

The package is pure Python with one optional compiled accelerator
(``abcertify._xsum``) used to fold long arrays of log-domain terms.
If Cython or a C compiler is unavailable the build silently proceeds
without it and the package falls back to the equivalent Python loop.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    from setuptools.errors import CCompilerError, ExecError, PlatformError
except ImportError:  # setuptools < 60
    from distutils.errors import (  # type: ignore[no-redef]
        CCompilerError,
        DistutilsExecError as ExecError,
        DistutilsPlatformError as PlatformError,
    )

_BUILD_ERRORS = (CCompilerError, ExecError, PlatformError, FileNotFoundError, ValueError)


class OptionalBuildExt(build_ext):
    """Build extensions, tolerating any compiler failure."""

    def run(self):
        try:
            super().run()
        except _BUILD_ERRORS:
            print("WARNING: compiled accelerator skipped (build_ext failed); "
                  "using pure-Python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except _BUILD_ERRORS:
            print(f"WARNING: {ext.name} skipped (compile failed); "
                  "using pure-Python fallback")


ext_modules = []
if not os.environ.get("ABCERTIFY_PURE_PYTHON"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("abcertify._xsum", ["src/abcertify/_xsum.pyx"])],
            language_level="3",
        )
    except ImportError:
        print("WARNING: Cython not found; building without the compiled accelerator")

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
