"""Build the optional compiled finite-field kernel.

The package works without it: ``sdhall.gf`` falls back to the pure-Python
kernel when ``sdhall._gfcore`` cannot be imported.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("sdhall._gfcore", ["src/sdhall/_gfcore.pyx"], optional=True)],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
