"""Version string reported by --version and written into every sidecar.

Inside a git checkout this is 'git describe'; otherwise the version of
the installed distribution.

"""

import subprocess
import os
from importlib import metadata

def _describe():
    here = os.path.dirname(os.path.abspath(__file__))
    try:
        return subprocess.check_output(
            ['git', 'describe', '--dirty', '--always'], cwd=here,
            stderr=subprocess.DEVNULL).strip().decode('utf-8')
    except Exception:
        return None

def _installed():
    try:
        return metadata.version("apdiff")
    except metadata.PackageNotFoundError:
        return None

version = _describe() or _installed() or "unknown (not installed, and not " \
    "in a git checkout of the apdiff tree)"
