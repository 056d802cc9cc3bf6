"""Build the optional compiled kernels; the package falls back to numpy without them."""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing or failing
            print(f"warning: compiled kernels not built ({exc}); using the numpy fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: could not build {ext.name} ({exc}); using the numpy fallback")


try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("markedrot._kernels", ["src/markedrot/_kernels.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []


setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
