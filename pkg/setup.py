import numpy
from setuptools import Extension, setup

# The compiled top-k selection kernel is optional: the package falls back to
# the numpy implementation in hydg._kernels.knn_python when the extension is
# missing (see hydg/_kernels/__init__.py).
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "hydg._kernels._knn_cy",
                ["src/hydg/_kernels/_knn_cy.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
