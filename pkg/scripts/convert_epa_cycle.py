"""Convert a standard dynamometer cycle file to the cycle CSV format.

Regulatory cycles (UDDS, HWFET, US06, ...) are distributed by the EPA as
tab-separated ``time (s) / speed (mph)`` text files and are not bundled with
this package.  Download one, e.g. from
https://www.epa.gov/vehicle-and-fuel-emissions-testing/dynamometer-drive-schedules
then convert it:

    python scripts/convert_epa_cycle.py uddscol.txt udds.csv

The output uses the package's ``time_s,speed_kmh`` header at 1 s sampling and
can be passed to any ``--cycle``/``--cycles`` option.
"""

import argparse
import csv
import sys

MPH_TO_KMH = 1.609344


def convert(src_path: str, dst_path: str) -> int:
    rows = []
    with open(src_path) as fh:
        for line in fh:
            parts = line.replace(",", "\t").split()
            if len(parts) < 2:
                continue
            try:
                t, mph = float(parts[0]), float(parts[1])
            except ValueError:
                continue  # header or comment line
            rows.append((t, mph * MPH_TO_KMH))
    if len(rows) < 2:
        print(f"no (time, speed) rows found in {src_path}", file=sys.stderr)
        return 1
    with open(dst_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time_s", "speed_kmh"])
        for t, kmh in rows:
            writer.writerow([f"{t:g}", f"{max(kmh, 0.0):.4f}"])
    print(f"wrote {len(rows)} samples -> {dst_path}")
    return 0


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("source", help="EPA cycle text file (time s, speed mph)")
    parser.add_argument("dest", help="output cycle CSV path")
    args = parser.parse_args()
    return convert(args.source, args.dest)


if __name__ == "__main__":
    sys.exit(main())
