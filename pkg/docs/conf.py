import os
import sys

# Add the project directory to the sys.path
sys.path.insert(0, os.path.abspath("../src"))

from boltzsynth import __version__  # noqa: E402

# Project information
project = "boltzsynth"
author = "Joseph Wagner"
release = __version__
version = release.split("-")[0]
copyright = "2025, Joseph Wagner"

# General configuration
extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.viewcode",
    "sphinx.ext.napoleon",
    "sphinx.ext.intersphinx",
    "sphinx.ext.mathjax",
]

# Try to add sphinx_autodoc_typehints if available
try:
    import sphinx_autodoc_typehints  # noqa: F401

    extensions.append("sphinx_autodoc_typehints")
except ImportError:
    pass

exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]

# Options for HTML output
html_theme = "furo"
html_title = f"{project} {version}"

# Napoleon settings for Google style docstrings
napoleon_google_docstring = True
napoleon_numpy_docstring = False
napoleon_include_init_with_doc = False
napoleon_include_private_with_doc = False

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "scipy": ("https://docs.scipy.org/doc/scipy/", None),
}

autodoc_typehints = "description"
autodoc_typehints_description_target = "documented"
autodoc_member_order = "bysource"

nitpicky = False
nitpick_ignore = [
    ("py:class", "np.ndarray"),
    ("py:class", "numpy.random.Generator"),
]
