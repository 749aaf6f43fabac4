"""Backend selection for the march kernel.

Prefers the compiled extension (built from ``_stepcore.pyx``) and falls
back to the NumPy implementation when it is missing.  Both implement the
same update; ``tests/test_backends.py`` holds them to near-bitwise
agreement.
"""

from __future__ import annotations

from . import _stepcore_py

march_python = _stepcore_py.march

try:
    from . import _stepcore  # compiled extension

    march_compiled = _stepcore.march
    HAVE_COMPILED = True
except ImportError:  # pure-Python install
    march_compiled = None
    HAVE_COMPILED = False

BACKEND = "compiled" if HAVE_COMPILED else "python"
