import os

from setuptools import Extension, setup

# The native kernels are optional: without Cython (or with CLSIM_PURE_PYTHON=1
# at build time) the package installs with the pure-Python fallback only.
# -ffp-contract=off keeps C arithmetic bit-identical to the fallback (no FMA
# contraction), which the cross-backend equivalence tests rely on.
ext_modules = []
if os.environ.get("CLSIM_PURE_PYTHON") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "clsim._kernels._native",
                    ["src/clsim/_kernels/_native.pyx"],
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
