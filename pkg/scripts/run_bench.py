#!/usr/bin/env python3
"""Run the shipped corpus benchmark and print the scorecard.

Equivalent to `mtsc bench corpus corpus/labels.json`; kept as a script so
the whole evaluation is one command from a fresh checkout.
"""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from mtsc.cli import main  # noqa: E402

if __name__ == "__main__":
    corpus = ROOT / "corpus"
    sys.exit(main(["bench", str(corpus), str(corpus / "labels.json"),
                   *sys.argv[1:]]))
