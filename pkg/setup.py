import numpy as np
from setuptools import Extension, setup
from Cython.Build import cythonize

ext = Extension(
    "jndattack.kernels._core",
    ["src/jndattack/kernels/_core.pyx"],
    include_dirs=[np.get_include()],
    extra_compile_args=["-O3"],
)

setup(
    ext_modules=cythonize([ext], compiler_directives={"language_level": "3"}),
)
