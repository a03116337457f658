import os
import sys
sys.path.insert(0, os.path.abspath('../..'))
from risnet.version import __version__


# Sphinx configuration of the risnet documentation.

# -- Project information -----------------------------------------------------

project = 'risnet'
copyright = '2026, risnet developers'
author = 'risnet developers'
release = __version__


# -- General configuration ---------------------------------------------------

extensions = [
    'sphinx_rtd_theme',
    'sphinx.ext.autodoc',
    'sphinx.ext.napoleon'
]

# Docstrings use "Arguments:" and "Exceptions:" sections.
napoleon_custom_sections = [('Arguments', 'params_style'),
                            ('Exceptions', 'raises_style')]
autodoc_member_order = 'bysource'

templates_path = ['_templates']
exclude_patterns = []


# -- Options for HTML output -------------------------------------------------

html_theme = 'sphinx_rtd_theme'
html_static_path = ['_static']

# Needed for Read the Docs
master_doc = 'index'
