"""A* over the arena grid.

Moves are 8-connected with octile costs; a diagonal step needs both
orthogonal neighbours free, so paths never cut obstacle corners.
"""
import heapq
import logging
import math

from ..exceptions import BlockedStart
from .maps import cell_of

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)


def octile(a, b):
    dx, dy = abs(a[0] - b[0]), abs(a[1] - b[1])
    return max(dx, dy) + (SQRT2 - 1.0) * min(dx, dy)


def path_cost(start, path):
    """Length of ``path`` (a list of cells) walked from ``start``."""
    cost, previous = 0.0, start
    for cell in path:
        cost += SQRT2 if previous[0] != cell[0] and previous[1] != cell[1] else 1.0
        previous = cell
    return cost


def _as_cell(value):
    if isinstance(value[0], float) or isinstance(value[1], float):
        return cell_of(value)
    return (int(value[0]), int(value[1]))


def find_path(arena_map, start, goal, use_cache=True):
    """Shortest cell path from ``start`` to ``goal``, excluding ``start``.

    ``start`` and ``goal`` are cells or continuous points. Returns ``[]``
    when they share a cell and ``None`` when the goal is blocked or cannot be
    reached. Raises :class:`BlockedStart` when the start is blocked.
    """
    start, goal = _as_cell(start), _as_cell(goal)
    if arena_map.is_blocked(start):
        raise BlockedStart('Path start %s is blocked on %s' % (start, arena_map.name))
    if start == goal:
        return []
    if arena_map.is_blocked(goal):
        return None
    key = (start, goal)
    if use_cache and key in arena_map.path_cache:
        cached = arena_map.path_cache.get(key)
        return None if cached is None else list(cached)

    path = _astar(arena_map, start, goal)
    if use_cache:
        arena_map.path_cache.put(key, None if path is None else tuple(path))
    return path


def _astar(arena_map, start, goal):
    counter = 0
    frontier = [(octile(start, goal), counter, start)]
    came_from = {start: None}
    cost = {start: 0.0}
    closed = set()
    while frontier:
        _, _, current = heapq.heappop(frontier)
        if current == goal:
            break
        if current in closed:
            continue
        closed.add(current)
        for step, step_cost in arena_map.neighbours(current):
            new_cost = cost[current] + step_cost
            if new_cost < cost.get(step, math.inf) - 1e-12:
                cost[step] = new_cost
                came_from[step] = current
                counter += 1
                heapq.heappush(frontier, (new_cost + octile(step, goal), counter, step))
    else:
        logger.debug('No path from %s to %s on %s', start, goal, arena_map.name)
        return None

    path = []
    cell = goal
    while cell != start:
        path.append(cell)
        cell = came_from[cell]
    path.reverse()
    return path
