"""Build script: compiles the optional edit-distance extension.

The package works without the extension (a pure-Python fallback is selected
at import time), so a failed compile downgrades to a warning instead of
aborting the install. Set SCIWB_SKIP_EXT=1 to skip the compile entirely.
"""

import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Treat extension build failures as non-fatal."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            f"WARNING: building the sciwb._speedups extension failed ({exc}); "
            "falling back to the pure-Python kernel",
            file=sys.stderr,
        )


ext_modules = []
cmdclass = {}
if os.environ.get("SCIWB_SKIP_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("sciwb._speedups", ["src/sciwb/_speedups.pyx"])],
            language_level=3,
        )
        cmdclass["build_ext"] = optional_build_ext
    except ImportError:
        print(
            "WARNING: Cython not available; installing without the compiled kernel",
            file=sys.stderr,
        )

setup(ext_modules=ext_modules, cmdclass=cmdclass)
