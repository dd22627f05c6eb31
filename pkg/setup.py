"""Build script: compiles the optional trigram-matching extension.

The package is fully functional without the extension (a NumPy fallback is
selected at import time); set HISTOGEOCODE_PURE=1 to skip compilation.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("HISTOGEOCODE_PURE") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/histogeocode/_kernels/_trgm_cy.pyx"],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "initializedcheck": False,
            },
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
