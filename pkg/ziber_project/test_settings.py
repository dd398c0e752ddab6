from .settings import *

TESTING = True

# Tests assert on return values; keep warnings from non-converged fits off the console.
LOGGING['loggers']['ziber']['level'] = 'ERROR'

# Small enough for the Monte Carlo tests to finish at desk scale.
ZIBER = {**ZIBER, 'N_RESTARTS': 3}
