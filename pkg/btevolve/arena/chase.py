"""Chase detection.

A zombie chases while it keeps moving toward a human within range. The
chase starts after ``min_ticks`` consecutive qualifying ticks and ends after
``break_ticks`` consecutive ticks that do not qualify.
"""
import math
from dataclasses import asdict, dataclass

from ..exceptions import ConfigError
from .agents import angle_between

CHASE_STARTED = 'chase_started'
CHASE_BROKEN = 'chase_broken'


@dataclass(frozen=True)
class ChaseConfig:
    angle_threshold: float = 30.0
    distance_threshold: float = 6.0
    min_ticks: int = 10
    break_ticks: int = 10
    restart_allowance: int = 3

    def __post_init__(self):
        if not 0.0 < self.angle_threshold <= 180.0:
            raise ConfigError('sim.chase.angle_threshold must lie in (0, 180]')
        if self.distance_threshold <= 0:
            raise ConfigError('sim.chase.distance_threshold must be positive')
        if self.min_ticks < 1 or self.break_ticks < 1:
            raise ConfigError('sim.chase.min_ticks and break_ticks must be at least 1')

    def to_dict(self):
        return asdict(self)


class ChaseState(object):
    __slots__ = ('active', 'qualifying', 'violating', 'starts')

    def __init__(self):
        self.active = False
        self.qualifying = 0
        self.violating = 0
        self.starts = 0


def is_chasing_move(zombie, humans, cfg, epsilon=1e-6):
    """Whether this tick's displacement heads at a live human in range."""
    dx, dy = zombie.displacement
    if math.hypot(dx, dy) < epsilon:
        return False
    heading = math.atan2(dy, dx)
    limit = math.radians(cfg.angle_threshold)
    origin = (zombie.prev_x, zombie.prev_y)
    for human in humans:
        if not human.alive:
            continue
        distance = math.hypot(human.x - origin[0], human.y - origin[1])
        if distance > cfg.distance_threshold:
            continue
        bearing = math.atan2(human.y - origin[1], human.x - origin[0])
        if angle_between(heading, bearing) <= limit:
            return True
    return False


def chase_detector_step(zombie, humans, state, cfg):
    """Advance ``state`` by one tick; returns an event name or ``None``."""
    if is_chasing_move(zombie, humans, cfg):
        state.violating = 0
        if not state.active:
            state.qualifying += 1
            if state.qualifying >= cfg.min_ticks:
                state.active = True
                state.qualifying = 0
                state.starts += 1
                return CHASE_STARTED
        return None
    state.qualifying = 0
    if state.active:
        state.violating += 1
        if state.violating >= cfg.break_ticks:
            state.active = False
            state.violating = 0
            return CHASE_BROKEN
    return None
