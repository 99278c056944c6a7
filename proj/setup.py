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
        import pybind11

        source = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        subprocess.run(
            [
                "cmake",
                "-S", str(source),
                "-B", str(build_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                "-DFINSPEC_BUILD_TESTS=OFF",
                "-DFINSPEC_BUILD_CLI=OFF",
                "-DFINSPEC_BUILD_PYTHON=ON",
                f"-Dpybind11_DIR={pybind11.get_cmake_dir()}",
                f"-DPython_EXECUTABLE={sys.executable}",
                f"-DPython3_EXECUTABLE={sys.executable}",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_core", "--parallel"],
            check=True,
        )

        built = sorted((build_dir / "python" / "finspec").glob("_core.*"))
        if not built:
            raise RuntimeError("CMake build produced no _core extension module")
        dest_dir = Path(self.get_ext_fullpath(ext.name)).resolve().parent
        dest_dir.mkdir(parents=True, exist_ok=True)
        # Keep the ABI-tagged filename the toolchain chose.
        shutil.copy2(built[-1], dest_dir / built[-1].name)


setup(
    ext_modules=[CMakeExtension("finspec._core")],
    cmdclass={"build_ext": CMakeBuild},
)
