"""Report rendering utilities"""
from io import StringIO
from typing import Dict, List

import pandas as pd

from iwasawa_sha.models.report import RunReport

TIMING_FIELD = "timing"


def render_json(report: RunReport) -> str:
    return report.model_dump_json(indent=2, by_alias=True)


def render_csv(rows: List[Dict]) -> str:
    """Flat CSV, nested dicts spread into dotted columns"""
    output = StringIO()
    if not rows:
        return ""
    frame = pd.json_normalize(rows)
    frame.to_csv(output, index=False)
    return output.getvalue()


def deterministic_view(report: RunReport) -> Dict:
    """Report without the wall-clock field; equal across runs with equal seeds"""
    return report.model_dump(mode="json", by_alias=True, exclude={TIMING_FIELD})
