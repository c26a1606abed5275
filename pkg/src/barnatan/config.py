"""Runtime knobs.

DEBUG_CHECKS turns on the expensive internal verifications (d^2 = 0 after
every cube build, chain-map law after every constructor).  Release runs keep
it off; the test suite switches it on explicitly.
"""

import os

DEBUG_CHECKS = os.environ.get("BARNATAN_DEBUG", "") not in ("", "0")

# Largest crossing number for which the full 2^n cube may be materialized.
FULL_CUBE_CAP = int(os.environ.get("BARNATAN_FULL_CUBE_CAP", "14"))
