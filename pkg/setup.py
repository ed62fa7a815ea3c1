from setuptools import Extension, setup

# The compiled kernels are an optional speedup; the package falls back to
# the numpy implementation in jacobispec._kernels_py when the extension is
# missing.
try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = []
if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "jacobispec._kernels_cy",
                ["src/jacobispec/_kernels_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=extensions)
