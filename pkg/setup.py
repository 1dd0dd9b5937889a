"""Build hook for the optional compiled KDE kernels.

The extension is marked optional: if Cython or a C compiler is missing the
package still installs and ``cwbal._backend`` falls back to NumPy.

Environment knobs:
  CWBAL_NO_OPENMP=1   build without OpenMP
  CWBAL_NATIVE=1      add -march=native (AVX2/AVX-512 exp on capable CPUs)
"""
import os
import platform
import sys

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# finite-math lets gcc call glibc's vector exp/erfc (libmvec); inputs that
# could overflow are routed to the NumPy path before reaching this code.
# -ffast-math itself is avoided so crtfastmath never sets FTZ/DAZ process-wide.
MATH_FLAGS = ["-fno-math-errno", "-funsafe-math-optimizations", "-ffinite-math-only"]

ext_modules = []
if cythonize is not None:
    compile_args, link_args = ["-O3"], []
    if sys.platform.startswith("linux"):
        compile_args += MATH_FLAGS
        if platform.libc_ver()[0] == "glibc":
            link_args.append("-lmvec")
        if not os.environ.get("CWBAL_NO_OPENMP"):
            compile_args.append("-fopenmp")
            link_args.append("-fopenmp")
    if os.environ.get("CWBAL_NATIVE"):
        compile_args.append("-march=native")
    ext = Extension(
        "cwbal._kernels",
        [os.path.join("src", "cwbal", "_kernels.pyx")],
        include_dirs=[np.get_include()],
        extra_compile_args=compile_args,
        extra_link_args=link_args,
        optional=True,
    )
    ext_modules = cythonize([ext], language_level="3")

setup(ext_modules=ext_modules)
