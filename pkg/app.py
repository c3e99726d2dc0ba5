# app.py
import sys

from cli.main import dispatch

if __name__ == "__main__":
    sys.exit(dispatch())
