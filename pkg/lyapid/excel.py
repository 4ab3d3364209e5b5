"""
Census tables as Excel workbooks.
"""

from openpyxl import Workbook, load_workbook

from .census import CensusReport

SHEET_TITLE = 'Table'


def write_census_workbook(reports, file_path):
    """Write one heading row and one row per report to a new workbook.

    :param reports: iterable of CensusReport
    :param file_path: where to save the .xlsx file
    """
    workbook = Workbook()
    sheet = workbook.active
    sheet.title = SHEET_TITLE
    sheet.append(list(CensusReport.COLUMNS))
    for report in reports:
        sheet.append(list(report.counts()))
    workbook.save(file_path)


def read_census_workbook(file_path):
    """Rows of a census workbook as dictionaries keyed by the heading text."""
    workbook = load_workbook(file_path, read_only=True)
    try:
        if SHEET_TITLE not in workbook.sheetnames:
            raise ValueError('Workbook {} has no sheet named {}'.format(file_path, SHEET_TITLE))
        rows = workbook[SHEET_TITLE].iter_rows(values_only=True)
        heading = next(rows, None)
        if heading is None:
            return []
        return [dict(zip(heading, row)) for row in rows if any(cell is not None for cell in row)]
    finally:
        workbook.close()
