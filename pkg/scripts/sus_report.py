#!/usr/bin/env python3
"""Score a usability questionnaire CSV and print the subscale table.

Expects columns id,Q1..Q10 with raw 1-5 answers (odd items positive,
even items negative). Defaults to the bundled classroom sample.

Usage: python3 scripts/sus_report.py [csv_path]
"""

from __future__ import annotations

import sys

sys.path.insert(0, "src")

from coopera.analytics import SUS_SUBSCALES, load_sus_csv, round_half_up, sus_score


def main(argv: list[str]) -> int:
    path = argv[0] if argv else "fixtures/sus_classroom.csv"
    report = sus_score(load_sus_csv(path))

    print(f"respondents: {report.n}")
    print(f"{'subscale':<24}{'items':>8}{'mean':>8}")
    for name, items in SUS_SUBSCALES.items():
        mean = report.subscale_means[name]
        label = ",".join(f"Q{i}" for i in items)
        print(f"{name:<24}{label:>8}{round_half_up(mean):>8.2f}")
    sd = f" (SD {round_half_up(report.composite_sd):.2f})" if report.composite_sd is not None else ""
    print(f"composite (0-100): {round_half_up(report.composite_mean):.2f}{sd}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
