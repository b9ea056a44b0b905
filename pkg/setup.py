"""Build hook for the optional compiled kernel.

If Cython or a C toolchain is missing the package still installs; the
kernel then falls back to the pure-Python interpreter at import time.
"""

import numpy
from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/proxy_audit/kernel/_core.pyx"],
        compiler_directives={"language_level": "3"},
    )
    for ext in ext_modules:
        ext.include_dirs.append(numpy.get_include())
        ext.define_macros.append(
            ("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION"))
except ImportError:
    pass

setup(ext_modules=ext_modules)
