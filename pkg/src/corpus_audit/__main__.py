import sys

from corpus_audit.cli import main

sys.exit(main())
