"""Module execution entry point: ``python -m pseudoflow ...``."""
from .cli import main

main()
