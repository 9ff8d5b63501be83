"""Build the optional compiled pair kernel; the package works without it."""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SHALLOW_UN_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("Cython not found: installing the pure-Python kernel only")
    else:
        ext_modules = cythonize(
            [Extension("shallow_un._pairs", ["src/shallow_un/_pairs.pyx"],
                       language="c++", extra_compile_args=["-O2"])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
