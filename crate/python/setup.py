"""Build the optrec_py extension by delegating to cargo.

The extension lives in the Rust workspace one directory up; this shim keeps
`pip install -e . --no-build-isolation` working without a Rust-specific
build backend.
"""

import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

REPO_ROOT = Path(__file__).resolve().parent.parent


def built_library() -> Path:
    stem = "optrec_py"
    if sys.platform == "win32":
        name = f"{stem}.dll"
    elif sys.platform == "darwin":
        name = f"lib{stem}.dylib"
    else:
        name = f"lib{stem}.so"
    return REPO_ROOT / "target" / "release" / name


class CargoBuildExt(build_ext):
    def build_extension(self, ext: Extension) -> None:
        subprocess.run(
            ["cargo", "build", "--release", "--package", "optrec-py"],
            cwd=REPO_ROOT,
            check=True,
        )
        destination = Path(self.get_ext_fullpath(ext.name))
        destination.parent.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(built_library(), destination)


setup(
    ext_modules=[Extension("optrec_py", sources=[])],
    cmdclass={"build_ext": CargoBuildExt},
)
