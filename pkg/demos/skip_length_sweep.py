"""How the maximal skip length J changes learning on the zigzag grid.

J=1 is plain Q-learning.  Moderate J cuts the number of decisions sharply and
speeds learning up; very long skips mostly add options that overshoot.

    python demos/skip_length_sweep.py --seeds 0-2 --js 1,3,7,16
"""
import argparse

from skipgrid.experiment import RunConfig, parse_seeds, reproduce_table


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seeds", default="0-2")
    parser.add_argument("--js", default="1,2,4,7,10,16")
    parser.add_argument("--episodes", type=int, default=10_000)
    args = parser.parse_args()

    res = reproduce_table(envs=[], schedules=[], agents=[], seeds=parse_seeds(args.seeds),
                          base=RunConfig(episodes=args.episodes),
                          skip_sweep=parse_seeds(args.js))
    print(f"{'J':>3} {'AUC':>7} {'decisions':>10}")
    for row in res.rows:
        print(f"{row['max_skip']:>3} {row['auc_mean']:7.3f} {row['decisions_mean']:10.1f}")


if __name__ == "__main__":
    main()
