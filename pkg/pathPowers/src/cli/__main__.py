# src/cli/__main__.py
import sys

from cli.commands import run

sys.exit(run())
