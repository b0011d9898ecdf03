"""Regenerate the synthetic cycle assets bundled under src/evcool/data/cycles.

The generator is deterministic, so re-running this script reproduces the
shipped files byte for byte.
"""

from pathlib import Path

from evcool.cycles import synthetic_cycle

OUT = Path(__file__).resolve().parent.parent / "src" / "evcool" / "data" / "cycles"

SPECS = [
    # name, kind, duration s, seed
    ("synth_urban", "urban", 1370, 20),
    ("synth_city_a", "urban", 1200, 31),
    ("synth_city_b", "urban", 1300, 32),
    ("synth_suburban_a", "suburban", 1250, 41),
    ("synth_suburban_b", "suburban", 1400, 42),
    ("synth_highway_a", "highway", 1200, 51),
    ("synth_highway_b", "highway", 1350, 52),
]


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, kind, duration, seed in SPECS:
        cycle = synthetic_cycle(kind, duration, seed, name=name)
        path = OUT / f"{name}.csv"
        with path.open("w") as fh:
            fh.write("time_s,speed_kmh\n")
            for t, v in zip(cycle.times_s, cycle.speeds_kmh):
                fh.write(f"{t:g},{v:.3f}\n")
        mean = cycle.speeds_kmh.mean()
        print(f"{path.name}: {len(cycle)} s, mean {mean:.1f} km/h, "
              f"max {cycle.speeds_kmh.max():.1f} km/h")


if __name__ == "__main__":
    main()
