# Sphinx configuration for the rbm-trace docs.
# Build with: `tox -e docs` (or `sphinx-build docs docs/_build/html` after `pip install -e .[docs]`).

import os
import shutil
import subprocess
import sys

# Regenerate `overview.md` from the main `README.md`.
subprocess.run([sys.executable, "pre_build.py"], check=True, cwd=os.path.dirname(os.path.abspath(__file__)))

__location__ = os.path.dirname(__file__)
sys.path.insert(0, os.path.join(__location__, "../src"))

# -- Run sphinx-apidoc -------------------------------------------------------
# Keeps `docs/api` in sync with the package when building on readthedocs, where `tox -e docs` is not run.

from sphinx.ext import apidoc  # noqa: E402

output_dir = os.path.join(__location__, "api")
module_dir = os.path.join(__location__, "../src/rbm_trace")
shutil.rmtree(output_dir, ignore_errors=True)
try:
    apidoc.main(["--implicit-namespaces", "--private", "-f", "-o", output_dir, module_dir])
except Exception as e:  # pylint: disable=broad-exception-caught
    print(f"Running `sphinx-apidoc` failed!\n{e}")

# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.intersphinx",
    "sphinx.ext.autosummary",
    "sphinx.ext.viewcode",
    "sphinx.ext.mathjax",
    "sphinx.ext.napoleon",
    "myst_parser",
]
myst_enable_extensions = ["amsmath", "colon_fence", "dollarmath"]

source_suffix = [".rst", ".md"]
master_doc = "index"
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store", ".venv"]

project = "rbm-trace"
copyright = "2026, rbm-trace developers"

try:
    from rbm_trace import __version__ as version
except ImportError:
    version = ""
if not version or version.lower() == "unknown":
    version = os.getenv("READTHEDOCS_VERSION", "unknown")
release = version

pygments_style = "sphinx"

# -- HTML output -------------------------------------------------------------

html_theme = "furo"
html_title = "rbm-trace documentation"
htmlhelp_basename = "rbm-trace-doc"

# -- External mapping --------------------------------------------------------

python_version = ".".join(map(str, sys.version_info[0:2]))
intersphinx_mapping = {
    "python": ("https://docs.python.org/" + python_version, None),
    "numpy": ("https://numpy.org/doc/stable", None),
    "pandas": ("https://pandas.pydata.org/pandas-docs/stable", None),
    "scipy": ("https://docs.scipy.org/doc/scipy/reference", None),
    "pydantic": ("https://docs.pydantic.dev/latest", None),
}

print(f"loading configurations for {project} {version} ...", file=sys.stderr)
