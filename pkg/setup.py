"""Optional build of the Cython kernels; the package works without them."""
from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension
except ImportError:
    pass
else:
    ext_modules = cythonize(
        [
            Extension("tanglekit._kernels", ["src/tanglekit/_kernels.pyx"]),
            Extension("tanglekit._tanglecore", ["src/tanglekit/_tanglecore.pyx"]),
        ],
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )

setup(ext_modules=ext_modules)
