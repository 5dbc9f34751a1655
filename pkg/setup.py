from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # No Cython at build time: install the pure-Python package; the solvers
    # fall back to the interpreted kernels automatically.
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "phiharm._kernels",
                ["src/phiharm/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
