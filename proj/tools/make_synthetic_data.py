#!/usr/bin/env python3
"""Generate the bundled synthetic community dataset.

Hourly kWh for a 50 kWp PV plant, a ~10 kW internal load and 15 households
(~37 kW aggregate nominal demand), plus grid and ancillary-market prices.
The last seven days are the simulated week; everything before is history.
"""

import argparse
import datetime as dt
import math
import os

import numpy as np


def clear_sky(hour, doy):
    # solar day of roughly 14.5 h around midsummer, shorter in spring
    half = 6.2 + 1.1 * math.sin(2 * math.pi * (doy - 80) / 365)
    x = (hour + 0.5 - 13.0) / half
    return max(0.0, math.cos(x * math.pi / 2)) ** 1.3 if abs(x) < 1 else 0.0


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data", "synthetic"))
    ap.add_argument("--history-days", type=int, default=120)
    ap.add_argument("--seed", type=int, default=2022)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    first = dt.date(2022, 7, 1) - dt.timedelta(days=args.history_days)
    ndays = args.history_days + 7

    house = np.array([0.45, 0.35, 0.3, 0.3, 0.32, 0.45, 0.75, 0.9, 0.7, 0.55, 0.5, 0.55,
                      0.65, 0.6, 0.5, 0.5, 0.6, 0.8, 1.05, 1.2, 1.15, 1.0, 0.8, 0.6])
    internal = np.array([0.3, 0.3, 0.3, 0.3, 0.3, 0.35, 0.5, 0.7, 0.8, 0.85, 0.85, 0.8,
                         0.75, 0.8, 0.85, 0.85, 0.8, 0.7, 0.55, 0.45, 0.4, 0.35, 0.3, 0.3])
    pun_shape = np.array([0.85, 0.8, 0.78, 0.76, 0.77, 0.82, 0.92, 1.02, 1.05, 1.0, 0.95, 0.9,
                          0.86, 0.85, 0.88, 0.94, 1.02, 1.1, 1.2, 1.25, 1.22, 1.12, 1.0, 0.92])

    rows_e, rows_m, rows_g = [], [], []
    cloud = 0.8
    pun_level = 0.25
    for d in range(ndays):
        date = first + dt.timedelta(days=d)
        doy = date.timetuple().tm_yday
        cloud = min(1.0, max(0.15, 0.6 * cloud + 0.4 * rng.beta(5, 1.6)))
        # wholesale prices climbed through spring 2022
        pun_level = 0.97 * pun_level + 0.03 * (0.25 + 0.25 * d / ndays) + rng.normal(0, 0.01)
        weekend = date.weekday() >= 5
        for h in range(24):
            ts = "%sT%02d:00" % (date.isoformat(), h)
            pv = 50.0 * 0.82 * clear_sky(h, doy) * cloud * rng.uniform(0.85, 1.05)
            load = 10.037 * internal[h] * (0.6 if weekend else 1.0) * rng.uniform(0.85, 1.15)
            md = 37.076 * 0.55 * house[h] * (1.1 if weekend else 1.0) * rng.uniform(0.8, 1.2)
            rows_e.append((ts, pv, load, md))

            ce = max(0.02, pun_level * pun_shape[h] * rng.uniform(0.93, 1.07))
            ci = ce + 0.06
            rows_g.append((ts, ce, ci))
            # upward service clears around the import price, higher in the evening ramp
            sell = ce * (1.1 + 0.5 * rng.beta(2, 4) + (0.25 if 17 <= h <= 21 else 0.0))
            buy = ce * rng.uniform(0.3, 0.9)
            rows_m.append((ts, sell, buy))

    os.makedirs(args.out, exist_ok=True)

    def dump(name, header, rows):
        with open(os.path.join(args.out, name), "w") as f:
            f.write(",".join(header) + "\n")
            for r in rows:
                f.write(r[0] + "," + ",".join("%.4f" % v for v in r[1:]) + "\n")

    dump("energy.csv", ["timestamp", "pv_kwh", "load_kwh", "member_demand_kwh"], rows_e)
    dump("msd_prices.csv", ["timestamp", "msd_sell_max_eur_kwh", "msd_buy_min_eur_kwh"], rows_m)
    dump("grid_prices.csv", ["timestamp", "export_price_eur_kwh", "import_price_eur_kwh"], rows_g)


if __name__ == "__main__":
    main()
