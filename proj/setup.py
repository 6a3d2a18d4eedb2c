import os

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup


def eigen_include():
    for candidate in (
        os.environ.get("EIGEN3_INCLUDE_DIR"),
        "/usr/include/eigen3",
        "/usr/local/include/eigen3",
    ):
        if candidate and os.path.isdir(candidate):
            return candidate
    raise RuntimeError(
        "Eigen3 headers not found; set EIGEN3_INCLUDE_DIR to their location"
    )


def vendor_include():
    for candidate in ("vendor", "/opt/vendor"):
        if os.path.isfile(os.path.join(candidate, "json.hpp")):
            return candidate
    raise RuntimeError("vendored single-header dependencies not found")


core_sources = [
    "bindings/module.cpp",
    "src/rational.cpp",
    "src/polynomial.cpp",
    "src/basis.cpp",
    "src/constraints.cpp",
    "src/spectral.cpp",
    "src/solver.cpp",
    "src/refine.cpp",
    "src/exact.cpp",
    "src/pipeline.cpp",
    "src/bench.cpp",
]

ext = Pybind11Extension(
    "gramsos._core",
    sources=core_sources,
    include_dirs=["include", vendor_include(), eigen_include()],
    libraries=["gmpxx", "gmp"],
    cxx_std=20,
    extra_compile_args=["-O2"],
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
