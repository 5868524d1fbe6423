import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Union

import pandas as pd

logger = logging.getLogger(__name__)


def export_to_csv(df: pd.DataFrame, filename: Union[str, Path, io.StringIO]) -> None:
    """
    Export DataFrame to CSV format

    Args:
        df (pd.DataFrame): DataFrame to export
        filename (str or StringIO): Output filename or StringIO object
    """
    df.to_csv(filename, index=False)


def export_to_json(df: pd.DataFrame, filename: Union[str, Path, io.StringIO]) -> None:
    """
    Export DataFrame to JSON format

    Args:
        df (pd.DataFrame): DataFrame to export
        filename (str or StringIO): Output filename or StringIO object
    """
    df.to_json(filename, orient="records", indent=2)


def classes_to_frame(classes: Iterable) -> pd.DataFrame:
    """One row per isomorphism class; members joined with spaces."""
    rows = []
    for iso_class in classes:
        row = iso_class.as_dict()
        row["members"] = " ".join(str(m) for m in row["members"])
        rows.append(row)
    columns = ["representative", "members", "size", "canonical_hash", "aut_order", "rank2", "rank3"]
    return pd.DataFrame(rows, columns=columns)


def spectrum_to_frame(spectrum) -> pd.DataFrame:
    """Eigenvalue/multiplicity table of a resolved spectrum."""
    return pd.DataFrame([term.as_dict() for term in spectrum.terms], columns=["eigenvalue", "multiplicity"])


def export_table(df: pd.DataFrame, filename: Union[str, Path]) -> None:
    """Write CSV or JSON by file extension."""
    if str(filename).lower().endswith(".json"):
        export_to_json(df, filename)
    else:
        export_to_csv(df, filename)
    logger.info(f"Wrote {len(df)} rows to {filename}")


def write_report(report: Dict[str, Any], filename: Union[str, Path, io.StringIO]) -> None:
    """Write a report dictionary as indented JSON with sorted keys."""
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if isinstance(filename, io.StringIO):
        filename.write(text)
        return
    Path(filename).write_text(text)
    logger.info(f"Wrote report to {filename}")
