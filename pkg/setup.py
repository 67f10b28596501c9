import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "sumrule_lab.backends._riccati_cy",
                ["src/sumrule_lab/backends/_riccati_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    # Pure-python backend is selected at import time when the
    # extension is unavailable.
    ext_modules = []

setup(ext_modules=ext_modules)
