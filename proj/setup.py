"""Builds the compiled extension by driving the project's CMake tree.

The extension target (beamtrack_python -> beamtrack/_core) is defined in
bindings/CMakeLists.txt; this shim configures a CMake build with tests and
the CLI switched off and drops the built module into the wheel layout.
"""

import os
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = Path(__file__).resolve().parent
        # the module must land in <build_lib>/beamtrack/
        out_dir = Path(self.get_ext_fullpath(ext.name)).resolve().parent
        build_dir = Path(self.build_temp).resolve()
        build_dir.mkdir(parents=True, exist_ok=True)

        import pybind11

        cmake_args = [
            f"-DCMAKE_BUILD_TYPE={os.environ.get('CMAKE_BUILD_TYPE', 'Release')}",
            f"-Dpybind11_DIR={pybind11.get_cmake_dir()}",
            f"-DPython_EXECUTABLE={sys.executable}",
            "-DBEAMTRACK_BUILD_TESTS=OFF",
            "-DBEAMTRACK_BUILD_CLI=OFF",
        ]
        subprocess.run(
            ["cmake", "-S", str(source_dir), "-B", str(build_dir)] + cmake_args,
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "beamtrack_python",
             "--parallel"],
            check=True,
        )
        built = build_dir / "python" / "beamtrack"
        out_dir.mkdir(parents=True, exist_ok=True)
        for lib in built.glob("_core.*"):
            self.copy_file(lib, out_dir / lib.name)


setup(
    ext_modules=[CMakeExtension("beamtrack._core")],
    cmdclass={"build_ext": CMakeBuild},
)
