import os

from setuptools import setup

ext_modules = []
if os.environ.get("TREELOCAL_PURE", "") not in ("1", "true", "yes"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("treelocal._kernel_cy", ["src/treelocal/_kernel_cy.pyx"],
                       extra_compile_args=["-O3"])],
            compiler_directives={"language_level": 3},
        )

setup(ext_modules=ext_modules)
