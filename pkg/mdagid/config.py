"""
Runtime configuration read from the environment.

Flags given on the command line take precedence over these values.
"""
import os

DEFAULT_SEED = int(os.environ.get('MDAGID_SEED', '0'))
DEFAULT_N = int(os.environ.get('MDAGID_N', '100'))

# Numerators of random CPT entries are drawn from 1..bound; a binary column
# therefore never puts less than 1/(bound + 1) on a cell.
NUMERATOR_BOUND = int(os.environ.get('MDAGID_NUMERATOR_BOUND', '63'))

WORKERS = int(os.environ.get('MDAGID_WORKERS', '1'))
LOG_LEVEL = os.environ.get('MDAGID_LOG_LEVEL', 'WARNING')

INDICATOR_PREFIX = 'R_'
