# main.py
import sys
from pathlib import Path

# run from anywhere: imports are rooted at the repository directory
sys.path.insert(0, str(Path(__file__).parent))

from cli.main import main

if __name__ == "__main__":
    sys.exit(main())
