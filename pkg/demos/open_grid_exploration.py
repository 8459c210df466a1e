"""Directed exploration on the open 23x23 grid.

An untrained agent has to find a single goal cell far from the start.  Skip
Q-learning makes long straight moves early on, temporally-extended epsilon-greedy
Q-learning holds random actions for zeta-distributed durations, and plain
Q-learning dithers.  We report when each first reaches the goal reliably, i.e.
on all ten evaluation rollouts of a checkpoint.

    python demos/open_grid_exploration.py --seeds 0-5
"""
import argparse
import statistics

from skipgrid import RunConfig, run
from skipgrid.experiment import parse_seeds


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seeds", default="0-5")
    parser.add_argument("--episodes", type=int, default=200)
    args = parser.parse_args()

    for agent, label in (("q", "Q"), ("teq", "te-greedy Q"), ("tq", "skip Q")):
        cfg = RunConfig(env="open23", agent=agent, episodes=args.episodes, schedule="const",
                        eval_repeats=10, seeds=parse_seeds(args.seeds))
        firsts = [p["first_success"] or float("inf") for p in run(cfg).per_seed]
        print(f"{label:>12}: median first reliable success at episode "
              f"{statistics.median(firsts)}")


if __name__ == "__main__":
    main()
