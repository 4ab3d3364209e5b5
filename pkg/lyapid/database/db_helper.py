"""
Helper methods for using the database from python
"""

from .db_model import CensusRun


def store_report(session, report):
    """Add a census report to the session and return the new row."""
    run = CensusRun.from_report(report)
    session.add(run)
    session.flush()
    return run


def latest_report(session, n):
    """The most recently stored report for n nodes, or None."""
    run = session.query(
        CensusRun
    ).filter_by(
        n=n
    ).order_by(
        CensusRun.created.desc(), CensusRun.run_id.desc()
    ).first()
    return run.to_report() if run is not None else None


def all_runs(session):
    return session.query(CensusRun).order_by(CensusRun.n, CensusRun.run_id).all()
