# Sphinx configuration for the begfad API docs.

import os
import sys
sys.path.insert(0, os.path.abspath('..'))

project = 'begfad'
copyright = '2026, begfad developers'
author = 'begfad developers'
release = '2026.10.0'

extensions = ['sphinx.ext.autodoc']
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

# The compiled kernels import numba.
autodoc_mock_imports = ['numba']

html_theme = 'sphinx_rtd_theme'
