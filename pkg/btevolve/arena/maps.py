"""Grid maps.

Map files are text grids under a small header::

    name: small
    size: 16x16
    ################
    #Z....W........#
    ...

``#`` obstacle, ``.`` free, ``W`` waypoint, ``Z`` zombie spawn, ``H`` human
spawn. Cell ``(x, y)`` is column ``x`` of row ``y`` and covers
``[x, x+1) x [y, y+1)`` in continuous coordinates.
"""
import functools
import math
import os
from collections import OrderedDict, deque

from ..config import PRESETS_DIR
from ..exceptions import MapError

OBSTACLE, FREE, WAYPOINT, ZOMBIE_SPAWN, HUMAN_SPAWN = '#', '.', 'W', 'Z', 'H'

ORTHOGONAL = ((1, 0), (-1, 0), (0, 1), (0, -1))
DIAGONAL = ((1, 1), (1, -1), (-1, 1), (-1, -1))


PATH_CACHE_SIZE = 1024


class PathCache(object):
    """Least-recently-used store of A* results keyed by (start, goal) cells."""

    def __init__(self, maxsize=PATH_CACHE_SIZE):
        self.maxsize = maxsize
        self._entries = OrderedDict()

    def __len__(self):
        return len(self._entries)

    def __contains__(self, key):
        return key in self._entries

    def get(self, key):
        value = self._entries[key]
        self._entries.move_to_end(key)
        return value

    def put(self, key, value):
        self._entries[key] = value
        self._entries.move_to_end(key)
        while len(self._entries) > self.maxsize:
            self._entries.popitem(last=False)

    def clear(self):
        self._entries.clear()


def cell_of(point):
    return (int(math.floor(point[0])), int(math.floor(point[1])))


def center(cell):
    return (cell[0] + 0.5, cell[1] + 0.5)


class ArenaMap(object):

    def __init__(self, name, width, height, blocked, waypoints=(), zombie_spawns=(), human_spawns=()):
        self.name = name
        self.width = width
        self.height = height
        self.blocked = frozenset(blocked)
        self.waypoints = tuple(waypoints)
        self.zombie_spawns = tuple(zombie_spawns)
        self.human_spawns = tuple(human_spawns)
        self.path_cache = PathCache()

    def __repr__(self):
        return '<ArenaMap %s %dx%d>' % (self.name, self.width, self.height)

    def is_blocked(self, cell):
        x, y = cell
        return x < 0 or y < 0 or x >= self.width or y >= self.height or cell in self.blocked

    def is_free_point(self, point):
        return not self.is_blocked(cell_of(point))

    def free_cells(self):
        return [(x, y) for y in range(self.height) for x in range(self.width) if (x, y) not in self.blocked]

    def neighbours(self, cell):
        """8-connected moves; a diagonal needs both orthogonal cells free."""
        x, y = cell
        for dx, dy in ORTHOGONAL:
            step = (x + dx, y + dy)
            if not self.is_blocked(step):
                yield step, 1.0
        for dx, dy in DIAGONAL:
            step = (x + dx, y + dy)
            if not self.is_blocked(step) and not self.is_blocked((x + dx, y)) \
                    and not self.is_blocked((x, y + dy)):
                yield step, math.sqrt(2.0)

    def line_of_sight(self, a, b, step=0.2):
        """True when the segment ``a``-``b`` crosses no obstacle cell."""
        distance = math.hypot(b[0] - a[0], b[1] - a[1])
        samples = max(1, int(math.ceil(distance / step)))
        for i in range(samples + 1):
            t = i / samples
            if self.is_blocked(cell_of((a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t))):
                return False
        return True

    def validate(self):
        for kind, cells in (('waypoint', self.waypoints), ('zombie spawn', self.zombie_spawns),
                            ('human spawn', self.human_spawns)):
            for cell in cells:
                if self.is_blocked(cell):
                    raise MapError('%s: %s %s is blocked' % (self.name, kind, cell))
        if not self.zombie_spawns or not self.human_spawns:
            raise MapError('%s: the map needs zombie and human spawn cells' % self.name)
        free = self.free_cells()
        if not free:
            raise MapError('%s: the map has no free cell' % self.name)
        seen = {free[0]}
        queue = deque([free[0]])
        while queue:
            for step, _ in self.neighbours(queue.popleft()):
                if step not in seen:
                    seen.add(step)
                    queue.append(step)
        if len(seen) != len(free):
            raise MapError('%s: the free region is not connected' % self.name)
        return self

    def to_text(self):
        marks = {}
        for cells, mark in ((self.waypoints, WAYPOINT), (self.zombie_spawns, ZOMBIE_SPAWN),
                            (self.human_spawns, HUMAN_SPAWN)):
            for cell in cells:
                marks[cell] = mark
        lines = ['name: %s' % self.name, 'size: %dx%d' % (self.width, self.height)]
        for y in range(self.height):
            lines.append(''.join(
                OBSTACLE if (x, y) in self.blocked else marks.get((x, y), FREE)
                for x in range(self.width)
            ))
        return '\n'.join(lines) + '\n'

    def tile(self, columns, rows, name=None, open_seams=True):
        """Copy the map ``columns`` x ``rows`` times.

        With ``open_seams`` the border walls between copies are removed while
        the outer border stays.
        """
        width, height = self.width * columns, self.height * rows
        blocked, waypoints, zombies, humans = set(), [], [], []
        for row in range(rows):
            for column in range(columns):
                ox, oy = column * self.width, row * self.height

                def shift(cells):
                    return [(x + ox, y + oy) for x, y in cells]
                blocked.update(shift(self.blocked))
                waypoints += shift(self.waypoints)
                zombies += shift(self.zombie_spawns)
                humans += shift(self.human_spawns)
        if open_seams:
            seams_x = set()
            for column in range(1, columns):
                seams_x.update((column * self.width - 1, column * self.width))
            seams_y = set()
            for row in range(1, rows):
                seams_y.update((row * self.height - 1, row * self.height))
            for x, y in list(blocked):
                on_border = x in (0, width - 1) or y in (0, height - 1)
                if not on_border and (x in seams_x or y in seams_y) and self._is_wall_cell(x, y):
                    blocked.discard((x, y))
        return ArenaMap(name or '%s-%dx%d' % (self.name, columns, rows), width, height,
                        blocked, waypoints, zombies, humans)

    def _is_wall_cell(self, x, y):
        """Whether a tiled cell comes from this map's outer border wall."""
        lx, ly = x % self.width, y % self.height
        return lx in (0, self.width - 1) or ly in (0, self.height - 1)

    @classmethod
    def parse(cls, text):
        name, size, rows = None, None, []
        for line in text.splitlines():
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith('name:'):
                name = stripped[5:].strip()
            elif stripped.startswith('size:'):
                try:
                    width, height = (int(v) for v in stripped[5:].strip().lower().split('x'))
                except ValueError:
                    raise MapError('Bad size header %r' % stripped)
                size = (width, height)
            else:
                rows.append(stripped)
        if name is None or size is None:
            raise MapError('A map needs "name:" and "size:" headers')
        width, height = size
        if len(rows) != height or any(len(row) != width for row in rows):
            raise MapError('%s: grid does not match size %dx%d' % (name, width, height))
        blocked, waypoints, zombies, humans = [], [], [], []
        targets = {OBSTACLE: blocked, WAYPOINT: waypoints, ZOMBIE_SPAWN: zombies, HUMAN_SPAWN: humans}
        for y, row in enumerate(rows):
            for x, mark in enumerate(row):
                if mark == FREE:
                    continue
                if mark not in targets:
                    raise MapError('%s: unknown cell mark %r at %d,%d' % (name, mark, x, y))
                targets[mark].append((x, y))
        return cls(name, width, height, blocked, waypoints, zombies, humans)

    @classmethod
    def load(cls, path):
        try:
            with open(path, 'r', encoding='utf-8') as f:
                return cls.parse(f.read()).validate()
        except OSError as e:
            raise MapError('Cannot read map %s: %s' % (path, e))


PRESET_MAPS = ('small', 'medium', 'large')


@functools.lru_cache(maxsize=None)
def load_preset(name):
    """Bundled maps. ``medium`` is ``small`` tiled 2x2 with the seams opened."""
    if name == 'medium':
        return load_preset('small').tile(2, 2, name='medium').validate()
    if name not in PRESET_MAPS:
        raise MapError('Unknown map preset %r' % name)
    return ArenaMap.load(os.path.join(PRESETS_DIR, 'maps', '%s.map' % name))


def resolve_map(name_or_path, base_dir=None):
    if name_or_path in PRESET_MAPS:
        return load_preset(name_or_path)
    path = name_or_path
    if base_dir and not os.path.isabs(path):
        path = os.path.join(base_dir, path)
    return ArenaMap.load(path)
