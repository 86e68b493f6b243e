#!/usr/bin/env python3
"""Regenerate the shipped synthetic HPV baseline tables.

The original model's hard-coded monthly transition probabilities are not
public, so the repo ships a synthetic baseline with the right qualitative
shape: infection risk peaks around age 20 and decays, progression risk rises
with age, HR16 progresses fastest (then HR18, then other high-risk, then low
risk), and clearance rates put mean infection durations near 10-13 months.
Values are illustrative and user-replaceable; swap in your own CSV via the
model.baseline_table config key.

Writes src/epicalib/data/hpv_baseline_transitions.csv and
src/epicalib/data/background_mortality.csv.
"""

import csv
import math
import pathlib

DATA_DIR = pathlib.Path(__file__).resolve().parents[1] / "src" / "epicalib" / "data"

BANDS = [(lo, lo + 5) for lo in range(15, 85, 5)]
STRAINS = ["lr", "hr16", "hr18", "hro"]

# peak monthly infection probability per strain (age ~18-24)
INFECTION_PEAK = {"lr": 0.020, "hr16": 0.016, "hr18": 0.008, "hro": 0.028}
# monthly clearance, tuned so 1/(clear+prog) lands near the duration targets
CLEARANCE = {"lr": 0.098, "hr16": 0.066, "hr18": 0.091, "hro": 0.080}
# monthly progression probabilities at the reference age of 30
HPV_TO_CIN1 = {"lr": 0.004, "hr16": 0.012, "hr18": 0.009, "hro": 0.006}
CIN1_TO_CIN23 = {"lr": 0.005, "hr16": 0.020, "hr18": 0.014, "hro": 0.010}
CIN23_TO_CANCER = {"lr": 0.0004, "hr16": 0.0045, "hr18": 0.0028, "hro": 0.0022}
CIN1_REGRESSION = {"lr": 0.055, "hr16": 0.045, "hr18": 0.045, "hro": 0.045}
CIN23_REGRESSION = {"lr": 0.020, "hr16": 0.012, "hr18": 0.012, "hro": 0.012}


def infection_age_factor(age: float) -> float:
    """1 around the early-20s peak, ramping up from menarche and decaying after 24."""
    if age < 18:
        return max(0.15, (age - 14.0) / 4.0)
    if age <= 24:
        return 1.0
    return max(0.04, math.exp(-(age - 24.0) / 14.0))


def progression_age_factor(age: float) -> float:
    """Mild increase of lesion progression with age (1 at the reference age 30)."""
    return min(1.6, max(0.7, 1.0 + 0.012 * (age - 30.0)))


def cancer_age_factor(age: float) -> float:
    """Invasive progression rises steeply through the 40s and 50s."""
    return min(1.8, max(0.25, 0.25 + 0.031 * (age - 25.0)))


def monthly_mortality(age: int) -> float:
    """Gompertz-like female all-cause monthly mortality."""
    return min(0.05, 2.0e-5 * math.exp(0.082 * max(0, age - 15)))


def main() -> None:
    rows = []
    for lo, hi in BANDS:
        mid = 0.5 * (lo + hi)
        for s in STRAINS:
            rows.append(("well", "hpv", s, lo, hi, INFECTION_PEAK[s] * infection_age_factor(mid)))
            rows.append(("hpv", "well", s, lo, hi, CLEARANCE[s]))
            rows.append(("hpv", "cin1", s, lo, hi, HPV_TO_CIN1[s] * progression_age_factor(mid)))
            rows.append(("cin1", "well", s, lo, hi, CIN1_REGRESSION[s]))
            rows.append(("cin1", "cin23", s, lo, hi, CIN1_TO_CIN23[s] * progression_age_factor(mid)))
            rows.append(("cin23", "cin1", s, lo, hi, CIN23_REGRESSION[s]))
            rows.append(("cin23", "cancer_local", s, lo, hi, CIN23_TO_CANCER[s] * cancer_age_factor(mid)))
        rows.append(("cancer_local", "cancer_regional", "", lo, hi, 0.020))
        rows.append(("cancer_regional", "cancer_distant", "", lo, hi, 0.030))
        rows.append(("cancer_local", "dead", "", lo, hi, 0.004))
        rows.append(("cancer_regional", "dead", "", lo, hi, 0.018))
        rows.append(("cancer_distant", "dead", "", lo, hi, 0.060))

    DATA_DIR.mkdir(parents=True, exist_ok=True)
    with open(DATA_DIR / "hpv_baseline_transitions.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["from_state", "to_state", "strain", "age_lo", "age_hi", "probability"])
        for frm, to, s, lo, hi, p in rows:
            w.writerow([frm, to, s, lo, hi, f"{p:.6g}"])

    with open(DATA_DIR / "background_mortality.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["age", "monthly_prob"])
        for age in range(0, 100):
            w.writerow([age, f"{monthly_mortality(age):.6g}"])

    print(f"wrote {len(rows)} baseline rows and 100 mortality rows to {DATA_DIR}")


if __name__ == "__main__":
    main()
