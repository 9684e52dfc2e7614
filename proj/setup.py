"""Builds the native extension with CMake and drops it into the package.

The CMake project puts the module under <build>/python/uavtour/; this shim
copies it to wherever setuptools expects the extension artefact.
"""

import shutil
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
        source_dir = Path(__file__).parent.resolve()
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)
        subprocess.check_call(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                "-DUAVTOUR_BUILD_TESTS=OFF",
                f"-DPYTHON_EXECUTABLE={sys.executable}",
            ]
        )
        subprocess.check_call(
            ["cmake", "--build", str(build_dir), "--target", "_uavtour", "-j"]
        )
        built = sorted((build_dir / "python" / "uavtour").glob("_uavtour*"))
        if not built:
            raise RuntimeError("cmake did not produce the _uavtour module")
        target = Path(self.get_ext_fullpath(ext.name))
        target.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(built[0], target)


setup(
    ext_modules=[CMakeExtension("uavtour._uavtour")],
    cmdclass={"build_ext": CMakeBuild},
)
