"""Train on a hand-drawn map and inspect the learned skip policy.

Maps are plain text: S start, G goal, # cliff, . free, with an optional
``limit=<n>`` header for the episode step limit.
"""
from skipgrid import AgentConfig, Schedule, load_grid, train_temporl
from skipgrid.evaluation import shortest_path
from skipgrid.gridworld import Action, GridEnv

MAP = """\
limit=80
..........
.####..#..
.#.....#..
.#.G...#..
.#######..
S.........
"""


def main():
    spec = load_grid(MAP, name="moat")
    print(f"shortest path: {shortest_path(spec)} steps")
    q, sq, log = train_temporl(spec, AgentConfig(max_skip=5), Schedule.linear(), episodes=3000)
    final = log.checkpoints[-1]
    print(f"final greedy rollout: reward {final.reward}, {final.steps:.0f} steps, "
          f"{final.decisions:.0f} decisions")

    # replay the greedy policy and print each decision
    env = GridEnv(spec)
    s = env.reset_index()
    while not env.done:
        row = q.values[s]
        a = row.index(max(row))
        skips = sq.values[s][a]
        j = skips.index(max(skips)) + 1
        print(f"  at {spec.cell(s)}: {Action(a).name.lower()} x{j}")
        for _ in range(j):
            s, _, terminal, timeout = env.step_index(a)
            if terminal or timeout:
                break


if __name__ == "__main__":
    main()
