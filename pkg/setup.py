"""Build the compiled round kernel. If Cython or a compiler is missing the
package still installs and runs on the pure-Python kernel."""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("BPB_MARKET_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("bpb_market.learning._kernel",
                       ["src/bpb_market/learning/_kernel.pyx"],
                       include_dirs=[numpy.get_include()],
                       extra_compile_args=["-O3"])],
            compiler_directives={"language_level": 3},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
