"""Run the command-line interface with ``python -m QCatLab``"""
import sys

from QCatLab.cli import main


sys.exit(main())
