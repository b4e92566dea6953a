import warnings

from setuptools import Extension, setup


def _extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ModuleNotFoundError:
        warnings.warn("numpy and Cython are needed to build the compiled kernels; "
                      "falling back to the pure-Python implementation")
        return []
    ext = Extension(
        "ata_heat._kernels",
        ["src/ata_heat/_kernels.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=_extensions())
