"""
Hybrid view package: compact prompts for mixed text/JSON inputs with a request-scoped SQL datastore.
"""

__version__ = "0.1.0"
