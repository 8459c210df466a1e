"""Deterministic episodic gridworlds with sparse terminal rewards.

Coordinates are ``(row, col)`` with row 0 at the *bottom* of the grid and
col 0 at the left, so the ASCII maps read the way the layouts are drawn.

Map format (the ``limit=`` header is optional, default 100)::

    limit=100
    ..........
    ..........
    ..........
    ..######..
    ..######..
    S.######.G

``S`` start (exactly one), ``G`` goal (at least one), ``#`` cliff, ``.`` free.
The last text line is row 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import FrozenSet, List, NamedTuple, Tuple

Cell = Tuple[int, int]

DEFAULT_STEP_LIMIT = 100


class ConfigurationError(ValueError):
    """Invalid environment or experiment configuration."""


class MapParseError(ConfigurationError):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class EpisodeFinishedError(RuntimeError):
    """Raised when stepping an episode that already ended."""


class Action(IntEnum):
    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3


N_ACTIONS = 4
# (d_row, d_col) per action; row grows upwards
MOVES = ((1, 0), (-1, 0), (0, -1), (0, 1))


@dataclass(frozen=True)
class GridSpec:
    """Immutable gridworld layout."""

    rows: int
    cols: int
    start: Cell
    goal_cells: FrozenSet[Cell]
    cliff_cells: FrozenSet[Cell] = frozenset()
    step_limit: int = DEFAULT_STEP_LIMIT
    name: str = "custom"

    def __post_init__(self) -> None:
        object.__setattr__(self, "start", tuple(self.start))
        object.__setattr__(self, "goal_cells", frozenset(map(tuple, self.goal_cells)))
        object.__setattr__(self, "cliff_cells", frozenset(map(tuple, self.cliff_cells)))
        if self.rows < 1 or self.cols < 1:
            raise ConfigurationError("rows and cols must be positive")
        if self.step_limit < 1:
            raise ConfigurationError("step_limit must be >= 1")
        if not self.goal_cells:
            raise ConfigurationError("at least one goal cell is required")
        for cell in (self.start, *self.goal_cells, *self.cliff_cells):
            if not self.in_bounds(cell):
                raise ConfigurationError(f"cell {cell} is out of bounds")
        if self.goal_cells & self.cliff_cells:
            raise ConfigurationError("goal and cliff cells overlap")
        if self.start in self.goal_cells or self.start in self.cliff_cells:
            raise ConfigurationError("start must not be a goal or cliff cell")

    @property
    def n_states(self) -> int:
        return self.rows * self.cols

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.rows and 0 <= cell[1] < self.cols

    def index(self, cell: Cell) -> int:
        return cell[0] * self.cols + cell[1]

    def cell(self, index: int) -> Cell:
        return divmod(index, self.cols)

    def move(self, cell: Cell, action: int) -> Cell:
        """Adjacent cell in the action direction; border moves stay put."""
        dr, dc = MOVES[action]
        nxt = (cell[0] + dr, cell[1] + dc)
        return nxt if self.in_bounds(nxt) else cell

    def reward(self, cell: Cell) -> float:
        if cell in self.goal_cells:
            return 1.0
        if cell in self.cliff_cells:
            return -1.0
        return 0.0

    def is_terminal(self, cell: Cell) -> bool:
        return cell in self.goal_cells or cell in self.cliff_cells

    def tables(self) -> "TransitionTables":
        """Index-based lookup tables used by the learners' inner loops."""
        n = self.n_states
        nxt = [[self.index(self.move(self.cell(s), a)) for a in range(N_ACTIONS)] for s in range(n)]
        rew = [self.reward(self.cell(s)) for s in range(n)]
        term = [self.is_terminal(self.cell(s)) for s in range(n)]
        return TransitionTables(nxt, rew, term)


class TransitionTables(NamedTuple):
    next_state: List[List[int]]
    reward: List[float]
    terminal: List[bool]


class StepOutcome(NamedTuple):
    next_state: Cell
    reward: float
    terminal: bool
    timeout: bool


class GridEnv:
    """Mutable episode state over a shared :class:`GridSpec`.

    ``step`` speaks cells; ``step_index`` is the same transition on flat
    state indices (``row * cols + col``) for the learners' inner loops.
    """

    def __init__(self, spec: GridSpec) -> None:
        self.spec = spec
        self._tables = spec.tables()
        self._start = spec.index(spec.start)
        self.index = self._start
        self.steps = 0
        self.done = False

    @property
    def state(self) -> Cell:
        return self.spec.cell(self.index)

    def reset(self) -> Cell:
        self.index = self._start
        self.steps = 0
        self.done = False
        return self.spec.start

    def reset_index(self) -> int:
        self.reset()
        return self.index

    def step_index(self, action: int) -> Tuple[int, float, bool, bool]:
        if self.done:
            raise EpisodeFinishedError("episode already finished; call reset()")
        nxt = self._tables.next_state[self.index][action]
        self.index = nxt
        self.steps += 1
        terminal = self._tables.terminal[nxt]
        timeout = not terminal and self.steps >= self.spec.step_limit
        self.done = terminal or timeout
        return nxt, self._tables.reward[nxt], terminal, timeout

    def step(self, action: int) -> StepOutcome:
        if not 0 <= action < N_ACTIONS:
            raise ValueError(f"invalid action {action!r}")
        nxt, reward, terminal, timeout = self.step_index(action)
        return StepOutcome(self.spec.cell(nxt), reward, terminal, timeout)


def reset(env: GridEnv) -> Cell:
    return env.reset()


def step(env: GridEnv, action: int) -> StepOutcome:
    return env.step(action)


def _block(rows, cols) -> FrozenSet[Cell]:
    return frozenset((r, c) for r in rows for c in cols)


def builtin_grid(name: str) -> GridSpec:
    """Return one of the benchmark layouts: cliff, bridge, zigzag, open23."""
    if name == "cliff":
        return GridSpec(6, 10, (0, 0), frozenset({(0, 9)}),
                        _block(range(0, 3), range(2, 8)), 100, "cliff")
    if name == "bridge":
        cliffs = _block((0, 1), range(2, 8)) | _block((4, 5), range(2, 8))
        return GridSpec(6, 10, (0, 0), frozenset({(0, 9)}), cliffs, 100, "bridge")
    if name == "zigzag":
        cliffs = _block(range(0, 4), (2, 3)) | _block(range(2, 6), (6, 7))
        return GridSpec(6, 10, (0, 0), frozenset({(5, 9)}), cliffs, 100, "zigzag")
    if name == "open23":
        return GridSpec(23, 23, (22, 11), frozenset({(6, 5)}), frozenset(), 1000, "open23")
    raise ConfigurationError(
        f"unknown grid {name!r}; expected one of {', '.join(BUILTIN_GRIDS)}")


BUILTIN_GRIDS = ("cliff", "bridge", "zigzag", "open23")


def load_grid(map_text: str, name: str = "custom") -> GridSpec:
    """Parse an ASCII map (see module docstring) into a :class:`GridSpec`."""
    raw = map_text.splitlines()
    # keep 1-based source line numbers for error messages
    lines = [(i + 1, ln.rstrip("\r")) for i, ln in enumerate(raw)]
    lines = [(no, ln.strip()) for no, ln in lines if ln.strip()]
    if not lines:
        raise MapParseError("empty map", 1, 1)

    step_limit = DEFAULT_STEP_LIMIT
    if lines[0][1].startswith("limit="):
        no, header = lines.pop(0)
        try:
            step_limit = int(header[len("limit="):])
        except ValueError:
            raise MapParseError(f"bad step limit {header!r}", no, 7) from None
        if step_limit < 1:
            raise MapParseError("step limit must be >= 1", no, 7)
    if not lines:
        raise MapParseError("map has no grid rows", 1, 1)

    width = len(lines[0][1])
    n_rows = len(lines)
    start = None
    goals, cliffs = set(), set()
    for k, (no, text) in enumerate(lines):
        if len(text) != width:
            raise MapParseError(
                f"non-rectangular map: expected {width} columns, got {len(text)}",
                no, min(len(text), width) + 1)
        row = n_rows - 1 - k
        for col, ch in enumerate(text):
            if ch == "S":
                if start is not None:
                    raise MapParseError("multiple start cells", no, col + 1)
                start = (row, col)
            elif ch == "G":
                goals.add((row, col))
            elif ch == "#":
                cliffs.add((row, col))
            elif ch != ".":
                raise MapParseError(f"unexpected character {ch!r}", no, col + 1)
    if start is None:
        raise MapParseError("no start cell 'S'", lines[0][0], 1)
    if not goals:
        raise MapParseError("no goal cell 'G'", lines[0][0], 1)
    return GridSpec(n_rows, width, start, frozenset(goals), frozenset(cliffs), step_limit, name)


def render_map(spec: GridSpec, with_limit: bool = True) -> str:
    """Inverse of :func:`load_grid`."""
    out = [f"limit={spec.step_limit}"] if with_limit else []
    for row in reversed(range(spec.rows)):
        chars = []
        for col in range(spec.cols):
            cell = (row, col)
            if cell == spec.start:
                chars.append("S")
            elif cell in spec.goal_cells:
                chars.append("G")
            elif cell in spec.cliff_cells:
                chars.append("#")
            else:
                chars.append(".")
        out.append("".join(chars))
    return "\n".join(out) + "\n"
