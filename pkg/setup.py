from setuptools import Extension, setup

# The compiled kernel is optional: the package falls back to the numpy
# implementation in fplab.kernels._fallback when the extension is absent.
ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "fplab.kernels._ext",
                ["src/fplab/kernels/_ext.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
