import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# The extension is optional: the package falls back to the NumPy kernels
# when the compiled module is unavailable.
extensions = [
    Extension(
        "vaq._kernels._speedups",
        sources=["src/vaq/_kernels/_speedups.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        optional=True,
    )
]

setup(
    ext_modules=cythonize(extensions, language_level=3) if cythonize else [],
)
