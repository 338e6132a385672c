"""CSV output for learning curves and their steady-state summaries."""

import csv
import math
from pathlib import Path


def _num(x):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    return repr(float(x))


def emit_curves(curves, path):
    """One row per iteration: ``iteration,<label>_msd_db,...``."""
    curves = list(curves.values())
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iteration"] + [f"{c.label}_msd_db" for c in curves])
        columns = [c.msd_db.tolist() for c in curves]
        for n, row in enumerate(zip(*columns)):
            writer.writerow([n] + [repr(v) for v in row])


SUMMARY_HEADER = ["variant", "steady_msd_db", "steady_emse_db", "theory_emse_db", "excluded_runs"]


def emit_summary(curves, path):
    """One row per filter with steady-state MSD, empirical and theoretical EMSE."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_HEADER)
        for c in curves.values():
            theory = c.theory_emse.xi_db if c.theory_emse is not None else None
            writer.writerow(
                [
                    c.label,
                    _num(c.steady_state_msd_db),
                    _num(c.steady_state_emse.xi_db),
                    _num(theory),
                    c.excluded_runs,
                ]
            )


def read_csv(path):
    """Rows of a CSV written by this module as a list of dicts."""
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))
