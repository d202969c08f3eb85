#!/usr/bin/env python3
#
# qheun documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import qheun

# -- General configuration ------------------------------------------------

needs_sphinx = "1.3"

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.intersphinx",
    "sphinx.ext.mathjax",
    "sphinx.ext.viewcode",
    "sphinx.ext.napoleon",  # numpy-style docstrings
]

templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"

project = "qheun"
copyright = "2026, The qheun developers"  # noqa

version = release = qheun.__version__

exclude_patterns = ["_build"]

default_role = "py:obj"

pygments_style = "sphinx"

# -- Options for HTML output ----------------------------------------------

html_theme = "nature"
html_static_path = ["_static"]
htmlhelp_basename = "qheundoc"

# -- Options for LaTeX and manual pages -----------------------------------

latex_documents = [
    ("index", "qheun.tex", "qheun Documentation", "The qheun developers", "manual"),
]

man_pages = [
    ("index", "qheun", "qheun Documentation", ["The qheun developers"], 1),
]

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable", None),
}
