"""Build script: compiles the optional dense-kernel extension.

Set WEAKOCT_PURE=1 in the environment to skip the extension entirely; the
package then runs on the pure-Python kernel fallback.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("WEAKOCT_PURE"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "weakoct._kernels._speedups",
                    ["src/weakoct/_kernels/_speedups.pyx"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
