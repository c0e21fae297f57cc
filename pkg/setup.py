from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # fallback kernels are used when the extension is absent
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("bitbound.kernels._core", ["src/bitbound/kernels/_core.pyx"],
                   extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
