"""
A package to wrap the census results database and its connections
"""

from .db_model import CensusRun  # noqa
from .db import Session, connect  # noqa
from .db_helper import all_runs, latest_report, store_report  # noqa
