"""Scripted human characters.

Humans are not evolved. Every ``replan_interval`` seconds a human samples
points around itself and heads for the best one, preferring points far from
zombies, visible to itself but hidden from zombies, and ahead of its
heading. A human that is being chased sprints while stamina lasts.
"""
import math
from collections import namedtuple
from dataclasses import asdict, dataclass

import numpy as np

from ..exceptions import ConfigError
from .agents import angle_between

MoveCommand = namedtuple('MoveCommand', ['goal', 'velocity', 'speed', 'sprinting'])


@dataclass(frozen=True)
class HumanConfig:
    speed: float = 1.8
    replan_interval: float = 0.5
    candidate_count: int = 8
    candidate_radius: float = 4.0
    sprint_multiplier: float = 1.6
    sprint_duration: float = 2.0
    recovery_rate: float = 0.5
    detection_range: float = 5.0
    chase_angle: float = 45.0
    weight_distance: float = 1.0
    weight_visible: float = 0.5
    weight_hidden: float = 1.0
    weight_heading: float = 0.5

    def __post_init__(self):
        if self.speed < 0:
            raise ConfigError('sim.human.speed cannot be negative')
        if self.replan_interval <= 0:
            raise ConfigError('sim.human.replan_interval must be positive')
        if self.candidate_count < 1:
            raise ConfigError('sim.human.candidate_count must be at least 1')
        if self.sprint_multiplier < 1.0:
            raise ConfigError('sim.human.sprint_multiplier must be at least 1')
        if self.sprint_duration < 0 or self.recovery_rate < 0:
            raise ConfigError('sim.human stamina settings cannot be negative')

    def to_dict(self):
        return asdict(self)


def sample_candidates(human, world, cfg, rng):
    """Up to ``candidate_count`` free points uniform over a disc around ``human``."""
    points = []
    for _ in range(cfg.candidate_count):
        radius = cfg.candidate_radius * math.sqrt(rng.random())
        theta = rng.uniform(0.0, 2.0 * math.pi)
        point = (human.x + radius * math.cos(theta), human.y + radius * math.sin(theta))
        if world.map.is_free_point(point):
            points.append(point)
    return points


def score_candidate(human, point, world, cfg):
    zombies = world.zombies
    nearest = min((z.distance_to(point) for z in zombies), default=0.0)
    visible = 1.0 if world.map.line_of_sight(human.position, point) else 0.0
    hidden = 0.0 if any(world.can_see(z, point) for z in zombies) else 1.0
    alignment = 0.0
    if human.distance_to(point) > 1e-9:
        alignment = math.cos(angle_between(human.heading, human.bearing_to(point)))
    return (cfg.weight_distance * nearest + cfg.weight_visible * visible
            + cfg.weight_hidden * hidden + cfg.weight_heading * alignment)


def is_chased(human, world, cfg):
    """A zombie within detection range moved toward ``human`` this tick."""
    limit = math.radians(cfg.chase_angle)
    for zombie in world.zombies:
        if zombie.distance_to(human.position) > cfg.detection_range:
            continue
        dx, dy = zombie.displacement
        if math.hypot(dx, dy) < 1e-6:
            continue
        bearing = math.atan2(human.y - zombie.prev_y, human.x - zombie.prev_x)
        if angle_between(math.atan2(dy, dx), bearing) <= limit:
            return True
    return False


def human_controller_step(human, world, cfg, rng):
    """Plan and pick this tick's velocity for one live human.

    ``world`` is the arena: it provides ``map``, ``zombies``, ``dt`` and
    ``can_see(observer, point)``.
    """
    assert human.alive, 'Dead humans are not controlled'
    dt = world.dt
    human.replan_timer -= dt
    if human.goal is None or human.replan_timer <= 1e-9:
        human.replan_timer = cfg.replan_interval
        candidates = sample_candidates(human, world, cfg, rng)
        if candidates:
            scores = [score_candidate(human, point, world, cfg) for point in candidates]
            human.goal = candidates[int(np.argmax(scores))]

    sprinting = human.stamina > 0 and is_chased(human, world, cfg)
    if sprinting:
        human.stamina = max(0.0, human.stamina - dt)
    else:
        human.stamina = min(cfg.sprint_duration, human.stamina + cfg.recovery_rate * dt)
    human.sprinting = sprinting
    speed = cfg.speed * cfg.sprint_multiplier if sprinting else cfg.speed

    velocity = (0.0, 0.0)
    if human.goal is not None:
        distance = human.distance_to(human.goal)
        if distance > 1e-9:
            step = min(speed, distance / dt)
            velocity = ((human.goal[0] - human.x) / distance * step,
                        (human.goal[1] - human.y) / distance * step)
    return MoveCommand(human.goal, velocity, speed, sprinting)
