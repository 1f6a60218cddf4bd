import sys

from prisma.main import main

sys.exit(main())
