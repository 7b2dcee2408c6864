import sys

from emotion_core.main import main

sys.exit(main())
