"""Build script: compiles the optional Cython chain kernel.

The package works without the extension (a pure-Python kernel is selected
at import time), so a missing compiler only costs speed.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "fixdelay._chain_c",
                sources=["src/fixdelay/_chain_c.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
