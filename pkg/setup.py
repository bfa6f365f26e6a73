"""Build the optional compiled kernel against the MPFR shipped with gmpy2."""

import glob
import os
import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Skip the extension with a warning when it cannot be compiled."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"warning: compiled kernel skipped ({exc})", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: compiled kernel skipped ({exc})", file=sys.stderr)


def _extensions():
    try:
        import gmpy2
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    pkg_dir = os.path.dirname(gmpy2.__file__)
    lib_dir = os.path.join(os.path.dirname(pkg_dir), "gmpy2.libs")
    bundled = sorted(glob.glob(os.path.join(lib_dir, "lib*.so*")))
    kwargs = {"include_dirs": [pkg_dir]}
    if bundled:
        # wheels ship name-mangled copies of gmp/mpfr/mpc; link those exact files
        kwargs["library_dirs"] = [lib_dir]
        kwargs["runtime_library_dirs"] = [lib_dir]
        kwargs["extra_link_args"] = [f"-l:{os.path.basename(p)}" for p in bundled]
    else:
        kwargs["libraries"] = ["mpc", "mpfr", "gmp"]
    ext = Extension("ddsim.kernels._mpcore", ["src/ddsim/kernels/_mpcore.pyx"], **kwargs)
    return cythonize([ext], compiler_directives={"language_level": "3"}, quiet=True)


setup(ext_modules=_extensions(), cmdclass={"build_ext": OptionalBuildExt})
