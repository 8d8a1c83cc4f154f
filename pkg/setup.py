import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

ext = Extension(
    "treecp._kernel._ckernel",
    ["src/treecp/_kernel/_ckernel.pyx"],
    language="c++",
    include_dirs=[numpy.get_include()],
    # No -ffast-math: the pure-Python fallback must reproduce the compiled
    # kernel bit for bit, so IEEE semantics are mandatory.
    extra_compile_args=["-O3"],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
)

setup(ext_modules=cythonize([ext], language_level=3))
