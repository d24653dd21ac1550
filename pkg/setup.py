import os

import numpy as np
from setuptools import Extension, setup

# BUBBLECHAOS_PURE=1 skips the extension; the package then runs on _pycore.
if os.environ.get("BUBBLECHAOS_PURE"):
    ext_modules = []
else:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "bubblechaos._ccore",
                ["src/bubblechaos/_ccore.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
