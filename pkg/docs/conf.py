from importlib.metadata import version as get_version

# Project --------------------------------------------------------------

project = "vsmooth"
copyright = "2024 vsmooth contributors"
author = "vsmooth contributors"
release = get_version("vsmooth")
version = ".".join(release.split(".")[:2])

# General --------------------------------------------------------------

master_doc = "index"
extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.intersphinx",
    "sphinx.ext.mathjax",
]
autodoc_typehints = "description"
intersphinx_mapping = {
    "python": ("https://docs.python.org/3/", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "click": ("https://click.palletsprojects.com/en/8.1.x/", None),
}

# HTML -----------------------------------------------------------------

html_theme = "alabaster"
html_sidebars = {
    "index": ["about.html", "localtoc.html", "searchbox.html"],
    "**": ["localtoc.html", "relations.html", "searchbox.html"],
}
html_title = f"vsmooth Documentation ({version})"
html_show_sourcelink = False

# LaTeX ----------------------------------------------------------------

latex_documents = [
    (master_doc, f"vsmooth-{version}.tex", html_title, author, "manual")
]
