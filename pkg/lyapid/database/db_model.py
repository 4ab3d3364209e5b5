"""
This module stores the database models for census runs.
"""

import datetime

from sqlalchemy import Column, DateTime, Float, Integer
from sqlalchemy.orm import declarative_base

from ..census import CensusReport

Base = declarative_base()


def _utcnow():
    return datetime.datetime.now(datetime.timezone.utc).replace(tzinfo=None)


class CensusRun(Base):
    """One row of the equivalence-class table, as computed by a census run."""

    __tablename__ = 'census_run'

    run_id = Column(Integer, autoincrement=True, primary_key=True)
    n = Column(Integer, nullable=False, index=True)
    dag_count = Column(Integer, nullable=False)
    lyap_class_count = Column(Integer, nullable=False)
    lyap_identifiable_count = Column(Integer, nullable=False)
    markov_class_count = Column(Integer, nullable=False)
    markov_identifiable_count = Column(Integer, nullable=False)
    runtime_seconds = Column(Float, nullable=True)
    threads = Column(Integer, nullable=False, default=1)
    created = Column(DateTime, nullable=False, default=_utcnow)

    def __repr__(self):
        """Friendly display of census runs."""
        return ("<CensusRun {} n={} DAGs={} Lyapunov={}/{} Bayesian={}/{} threads={}>".format(
            self.run_id, self.n, self.dag_count, self.lyap_class_count, self.lyap_identifiable_count,
            self.markov_class_count, self.markov_identifiable_count, self.threads))

    @classmethod
    def from_report(cls, report):
        return cls(n=report.n,
                   dag_count=report.dag_count,
                   lyap_class_count=report.lyap_class_count,
                   lyap_identifiable_count=report.lyap_identifiable_count,
                   markov_class_count=report.markov_class_count,
                   markov_identifiable_count=report.markov_identifiable_count,
                   runtime_seconds=report.runtime_seconds,
                   threads=report.threads)

    def to_report(self):
        return CensusReport(n=self.n,
                            dag_count=self.dag_count,
                            lyap_class_count=self.lyap_class_count,
                            lyap_identifiable_count=self.lyap_identifiable_count,
                            markov_class_count=self.markov_class_count,
                            markov_identifiable_count=self.markov_identifiable_count,
                            runtime_seconds=self.runtime_seconds or 0.0,
                            threads=self.threads)
