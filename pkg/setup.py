"""Build the optional Cython kernel.

The package works without it: ``gokuui.sde.kernel`` falls back to numpy when
the extension cannot be imported.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("GOKUUI_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "gokuui.sde._slkernel",
                    ["src/gokuui/sde/_slkernel.pyx"],
                    include_dirs=[numpy.get_include()],
                    # keep results bit-identical to the numpy fallback
                    extra_compile_args=["-O2", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
