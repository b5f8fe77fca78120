import os

from setuptools import setup

ext_modules = []
if os.environ.get("SUMMEX_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "summex._kernels._ckernels",
                    ["src/summex/_kernels/_ckernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # Cython/numpy unavailable at build time: install pure-python only,
        # the kernel selector falls back at import.
        ext_modules = []

setup(ext_modules=ext_modules)
