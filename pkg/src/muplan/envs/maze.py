"""Procedural 15x19 mazes: Prim-grown corridors plus random wall removal.

Corridor cells live on the odd-coordinate lattice; Prim's algorithm carves a
spanning tree over that lattice, then each removable interior wall (a wall
with corridor on both opposite sides) is independently deleted with
probability ``p_remove``. Deleting walls only adds connections, so every
generated maze stays connected.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HEIGHT = 15
WIDTH = 19

WALL_CHAR = "#"
CORRIDOR_CHAR = "."
PILL_CHAR = "o"

NUM_PILLS = 4

Cell = tuple[int, int]


@dataclass(frozen=True)
class Maze:
    """Static maze layout: wall grid, pill cells and optional ghost schedule.

    ``ghost_schedule`` fixes (g0, g_delta) for hand-authored mazes; None means
    the environment samples a schedule per episode.
    """

    grid: np.ndarray  # (HEIGHT, WIDTH) bool, True = wall
    pill_positions: tuple[Cell, ...]
    ghost_schedule: tuple[int, float] | None = None

    def __post_init__(self):
        validate_maze(self)

    @property
    def corridor_cells(self) -> list[Cell]:
        rows, cols = np.nonzero(~self.grid)
        return [(int(r), int(c)) for r, c in zip(rows, cols)]

    def is_corridor(self, cell: Cell) -> bool:
        return not bool(self.grid[cell])

    def neighbors(self, cell: Cell) -> list[Cell]:
        r, c = cell
        out = []
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            nr, nc = r + dr, c + dc
            if 0 <= nr < HEIGHT and 0 <= nc < WIDTH and not self.grid[nr, nc]:
                out.append((nr, nc))
        return out


def validate_maze(maze: Maze) -> None:
    grid = maze.grid
    if grid.shape != (HEIGHT, WIDTH):
        raise ValueError(f"maze must be {HEIGHT}x{WIDTH}, got {grid.shape}")
    if not (grid[0].all() and grid[-1].all() and grid[:, 0].all() and grid[:, -1].all()):
        raise ValueError("maze border must be wall")
    if len(maze.pill_positions) != NUM_PILLS:
        raise ValueError(f"maze needs exactly {NUM_PILLS} pills")
    for cell in maze.pill_positions:
        if grid[cell]:
            raise ValueError(f"pill at {cell} sits on a wall")
    if len(set(maze.pill_positions)) != NUM_PILLS:
        raise ValueError("pill positions must be distinct")
    if not is_connected(grid):
        raise ValueError("corridor cells are not all mutually reachable")


def is_connected(grid: np.ndarray) -> bool:
    """True when every corridor cell is reachable from every other."""
    corridors = {(int(r), int(c)) for r, c in zip(*np.nonzero(~grid))}
    if not corridors:
        return False
    start = next(iter(corridors))
    seen = {start}
    stack = [start]
    while stack:
        r, c = stack.pop()
        for nr, nc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            if (nr, nc) in corridors and (nr, nc) not in seen:
                seen.add((nr, nc))
                stack.append((nr, nc))
    return len(seen) == len(corridors)


def _prim_corridors(rng: np.random.Generator) -> np.ndarray:
    """Spanning corridor tree over the odd-coordinate cell lattice."""
    grid = np.ones((HEIGHT, WIDTH), dtype=bool)
    lattice = [(r, c) for r in range(1, HEIGHT, 2) for c in range(1, WIDTH, 2)]
    start = lattice[int(rng.integers(len(lattice)))]
    grid[start] = False
    in_tree = {start}
    # frontier entries: (wall cell between, lattice cell on the far side)
    frontier: list[tuple[Cell, Cell]] = []

    def push_frontier(cell: Cell):
        r, c = cell
        for dr, dc in ((-2, 0), (2, 0), (0, -2), (0, 2)):
            nr, nc = r + dr, c + dc
            if 1 <= nr < HEIGHT - 1 and 1 <= nc < WIDTH - 1 and (nr, nc) not in in_tree:
                frontier.append(((r + dr // 2, c + dc // 2), (nr, nc)))

    push_frontier(start)
    while frontier:
        idx = int(rng.integers(len(frontier)))
        wall, cell = frontier.pop(idx)
        if cell in in_tree:
            continue
        grid[wall] = False
        grid[cell] = False
        in_tree.add(cell)
        push_frontier(cell)
    return grid


def _removable_walls(grid: np.ndarray) -> list[Cell]:
    """Interior walls with corridor on both opposite sides, in scan order."""
    walls = []
    for r in range(1, HEIGHT - 1):
        for c in range(1, WIDTH - 1):
            if not grid[r, c]:
                continue
            if (not grid[r - 1, c] and not grid[r + 1, c]) or \
               (not grid[r, c - 1] and not grid[r, c + 1]):
                walls.append((r, c))
    return walls


def generate_maze(rng: np.random.Generator, p_remove: float = 0.3) -> Maze:
    """Generate a connected maze with ``NUM_PILLS`` pills on corridor cells."""
    if not 0.0 <= p_remove <= 1.0:
        raise ValueError("p_remove must lie in [0, 1]")
    grid = _prim_corridors(rng)
    for wall in _removable_walls(grid):
        if rng.random() < p_remove:
            grid[wall] = False
    corridors = [(int(r), int(c)) for r, c in zip(*np.nonzero(~grid))]
    picks = rng.choice(len(corridors), size=NUM_PILLS, replace=False)
    pills = tuple(sorted(corridors[int(i)] for i in picks))
    return Maze(grid=grid, pill_positions=pills)


def sample_ghost_schedule(rng: np.random.Generator) -> tuple[int, float]:
    """Initial ghost count 1 + Poisson(1) and per-level increment 0.25 + U(0,1)."""
    g0 = 1 + int(rng.poisson(1.0))
    g_delta = 0.25 + float(rng.random())
    return g0, g_delta


def ghost_count(g0: int, g_delta: float, level: int) -> int:
    """Number of ghosts active at ``level`` (levels start at 1)."""
    if level < 1:
        raise ValueError("levels start at 1")
    return int(np.floor(g0 + (level - 1) * g_delta))


def to_ascii(maze: Maze) -> str:
    rows = []
    pills = set(maze.pill_positions)
    for r in range(HEIGHT):
        row = []
        for c in range(WIDTH):
            if (r, c) in pills:
                row.append(PILL_CHAR)
            elif maze.grid[r, c]:
                row.append(WALL_CHAR)
            else:
                row.append(CORRIDOR_CHAR)
        rows.append("".join(row))
    return "\n".join(rows) + "\n"


def from_ascii(text: str, ghost_schedule: tuple[int, float] | None = None) -> Maze:
    lines = [line for line in text.splitlines() if line]
    if len(lines) != HEIGHT or any(len(line) != WIDTH for line in lines):
        raise ValueError(f"expected {HEIGHT} rows of {WIDTH} chars")
    grid = np.ones((HEIGHT, WIDTH), dtype=bool)
    pills = []
    for r, line in enumerate(lines):
        for c, ch in enumerate(line):
            if ch == WALL_CHAR:
                continue
            elif ch == CORRIDOR_CHAR:
                grid[r, c] = False
            elif ch == PILL_CHAR:
                grid[r, c] = False
                pills.append((r, c))
            else:
                raise ValueError(f"unexpected char {ch!r} at row {r} col {c}")
    return Maze(grid=grid, pill_positions=tuple(pills), ghost_schedule=ghost_schedule)


# Hand-authored fixed maze in the spirit of the classic layout. One initial
# ghost, one more every two levels.
DEFAULT_MAZE_ASCII = """\
###################
#o.......#.......o#
#.##.###.#.###.##.#
#.................#
#.##.#.#####.#.##.#
#....#...#...#....#
####.###.#.###.####
#........#........#
####.###.#.###.####
#....#...#...#....#
#.##.#.#####.#.##.#
#.................#
#.##.###.#.###.##.#
#o.......#.......o#
###################
"""


def default_maze() -> Maze:
    return from_ascii(DEFAULT_MAZE_ASCII, ghost_schedule=(1, 0.5))


def maze_pool(size: int, seed: int, p_remove: float = 0.3) -> list[Maze]:
    """Deterministic pool of procedural mazes for generalization runs."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, size]))
    return [generate_maze(rng, p_remove) for _ in range(size)]
