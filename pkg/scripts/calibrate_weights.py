"""Calibrate the comfort weight of the running cost.

The energy term puts a price on every watt; the comfort weight decides how
much a sustained temperature offset from the target may save.  At steady
state a +1 degC offset lowers the electric power by roughly

    dP/dT = (load slope)/COP + load * d(1/COP)/dT,

and the optimizer settles at offset = energy_weight * |dP/dT| / (2 * comfort
weight).  This script evaluates dP/dT for a config under given conditions and
prints the comfort weight needed for a chosen steady offset, plus the offsets
implied by a few round weights.

    python scripts/calibrate_weights.py [--config CONFIG] [--ambient 33]
        [--solar 830] [--speed 40] [--offset 0.2]
"""

import argparse

from evcool.config import load_config
from evcool.plant import partial_load_ratio
from evcool.thermal import EnvironmentSample


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--config", default=None)
    parser.add_argument("--ambient", type=float, default=33.0)
    parser.add_argument("--solar", type=float, default=830.0)
    parser.add_argument("--speed", type=float, default=40.0, help="km/h")
    parser.add_argument("--offset", type=float, default=0.2,
                        help="desired steady temperature offset, degC")
    args = parser.parse_args()

    cfg = load_config(args.config)
    model = cfg.model()
    target = cfg.cost.target_temp_c
    env = EnvironmentSample(0.0, args.ambient, args.solar, args.speed / 3.6)

    dt = 0.5
    p = []
    for t in (target - dt, target + dt):
        q = model.equilibrium_load(env, t)
        plr = partial_load_ratio(q, model.limits)
        p.append(q / model.cop_map.cop(t, args.ambient, plr))
    dp_dt = (p[1] - p[0]) / (2 * dt)

    w1 = cfg.cost.energy_weight
    print(f"conditions: {args.ambient:g} degC ambient, {args.solar:g} W/m^2, "
          f"{args.speed:g} km/h, target {target:g} degC")
    print(f"steady electric power sensitivity dP/dT = {dp_dt:+.1f} W/degC")
    print(f"comfort weight for a {args.offset:g} degC steady offset: "
          f"{w1 * abs(dp_dt) / (2 * args.offset):.0f}")
    print("offsets implied by round weights:")
    for w2 in (100.0, 200.0, 500.0, 1000.0, 2000.0):
        print(f"  comfort_weight {w2:6.0f} -> offset "
              f"{w1 * abs(dp_dt) / (2 * w2):.3f} degC")
    print(f"configured comfort weight {cfg.cost.comfort_weight:g} -> offset "
          f"{w1 * abs(dp_dt) / (2 * cfg.cost.comfort_weight):.3f} degC")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
