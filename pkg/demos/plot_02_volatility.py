"""
High and low volatility days
============================

Each day's price range is normalized by the day's low. Days more than one
standard deviation above the stock's mean range are High, more than one
below are Low.
"""

import datetime as dt

from orderflow.volatility import classify_days, select_extremes

start = dt.date(2018, 11, 1)
ranges = [0.021, 0.019, 0.024, 0.052, 0.020, 0.018, 0.004, 0.022, 0.023, 0.021]
days = [start + dt.timedelta(days=i) for i in range(len(ranges))]

labels = classify_days(dict(zip(days, ranges)), ticker="XOM")
mu, sigma = labels[start].mu, labels[start].sigma
print(f"mu = {mu:.4f}, sigma = {sigma:.4f}")
for day, lab in labels.items():
    print(day, f"{lab.normalized_range:.3f}", lab.label)

# the sector analysis keeps at most one High and one Low day per stock
print(select_extremes(labels.values()))

# the sample standard deviation widens the band and may drop borderline days
sample = classify_days(dict(zip(days, ranges)), ticker="XOM", ddof=1)
print(sum(lab.label.value != "Neither" for lab in sample.values()), "days labeled with ddof=1")
