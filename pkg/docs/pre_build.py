"""Docs building code that must be ran before building the rbm-trace docs.

Updates ``docs/overview.md`` from the main ``README.md``: uncomments the docs-only sections, drops the repo-only
sections and fixes relative links.
"""

import os
import re

README_PATH = os.path.join(os.path.dirname(__file__), "../README.md")
OVERVIEW_PATH = os.path.join(os.path.dirname(__file__), "overview.md")

REPLACE = {
    "<!-- include_docs": "",
    "include_docs_end -->": "",
    # We are in `docs/` now.
    "./docs/": "",
    "(./CONTRIBUTING.md)": "(contributing.md)",
    "(./LICENSE.txt)": "(license.md)",
    "(#-": "(#",
}

print("Working on `docs/overview.md`...")

with open(README_PATH, "r", encoding="utf8") as file:
    content = file.read()

for k, v in REPLACE.items():
    content = content.replace(k, v)
content = re.sub(r"\n<!-- exclude_docs -->.*?<!-- exclude_docs_end -->", "", content, flags=re.DOTALL)

with open(OVERVIEW_PATH, "w", encoding="utf8") as file:
    file.write(content)
