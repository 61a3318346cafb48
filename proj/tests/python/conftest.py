import os
import sys

# Make the CMake-built extension and the python package importable without an
# install step: GSOPT_PYMODULE_DIR points at the directory holding _core.so,
# GSOPT_PYPKG_DIR at the python/ source tree.
for var in ("GSOPT_PYMODULE_DIR", "GSOPT_PYPKG_DIR"):
    path = os.environ.get(var)
    if path and path not in sys.path:
        sys.path.insert(0, path)
