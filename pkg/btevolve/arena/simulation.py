"""The fixed-timestep survival arena.

Each tick runs, in order: human respawns, zombie perception, the human
controllers, one tick of every zombie's tree, movement with obstacle
collision, damage, then fitness events (movement, idling, chases, searching
near the last known location).
"""
import csv
import logging
import math
import time
from collections import namedtuple
from dataclasses import asdict, dataclass, field, fields

from ..behavior_tree import SUCCESS, FAILURE, RUNNING, Blackboard, compile_tree, tick
from ..config import DEFAULT_DT, DEFAULT_EPISODE_LENGTH
from ..exceptions import BlockedStart, CompileError, ConfigError
from ..fitness import FitnessLedger
from ..rng import as_generator, derive
from .agents import (HUMAN, LAST_KNOWN_ENEMY_LOCATION, SENSED_PLAYER, TARGET_ENEMY, ZOMBIE, AgentState,
                     angle_between)
from .chase import CHASE_BROKEN, CHASE_STARTED, ChaseConfig, ChaseState, chase_detector_step
from .humans import HumanConfig, human_controller_step
from .maps import cell_of, center
from .pathfinding import find_path
from .primitives import ZombieContext

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ('tick', 'agent_id', 'role', 'x', 'y', 'health', 'event')

EpisodeResult = namedtuple('EpisodeResult', ['ledger', 'trace', 'failed', 'damage_taken'])


@dataclass(frozen=True)
class SimConfig:
    dt: float = DEFAULT_DT
    episode_length: float = DEFAULT_EPISODE_LENGTH
    zombie_speed: float = 2.0
    perception_radius: float = 8.0
    fov_degrees: float = 140.0
    target_memory: float = 2.0
    attack_range: float = 1.0
    damage_per_second: float = 25.0
    max_health: float = 100.0
    respawn_delay: float = 2.0
    arrival_radius: float = 0.3
    near_last_known_radius: float = 2.0
    idle_epsilon: float = 1e-6
    spawn_jitter: float = 0.3
    human: HumanConfig = field(default_factory=HumanConfig)
    chase: ChaseConfig = field(default_factory=ChaseConfig)

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigError('sim.dt must be positive')
        if self.episode_length <= 0:
            raise ConfigError('sim.episode_length must be positive')
        steps = self.episode_length / self.dt
        if abs(steps - round(steps)) > 1e-6:
            raise ConfigError('sim.episode_length must be a multiple of sim.dt')
        if not 0.0 < self.fov_degrees <= 360.0:
            raise ConfigError('sim.fov_degrees must lie in (0, 360]')
        if not 0.0 < self.max_health <= 100.0:
            raise ConfigError('sim.max_health must lie in (0, 100]')
        for name in ('zombie_speed', 'perception_radius', 'target_memory', 'attack_range',
                     'damage_per_second', 'respawn_delay', 'arrival_radius', 'near_last_known_radius'):
            if getattr(self, name) < 0:
                raise ConfigError('sim.%s cannot be negative' % name)
        if not 0.0 <= self.spawn_jitter < 0.5:
            raise ConfigError('sim.spawn_jitter must lie in [0, 0.5)')

    @property
    def ticks(self):
        return int(round(self.episode_length / self.dt))

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        data = dict(data or {})
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError('Unknown sim settings: %s' % ', '.join(sorted(unknown)))
        try:
            if 'human' in data:
                data['human'] = HumanConfig(**data['human'])
            if 'chase' in data:
                data['chase'] = ChaseConfig(**data['chase'])
            return cls(**data)
        except TypeError as e:
            raise ConfigError('Bad sim settings: %s' % e)


class Arena(object):
    """World state of one episode.

    Trees only request actions through :meth:`steer` and :meth:`follow_path`;
    perception, targeting and damage are the arena's business.
    """

    def __init__(self, arena_map, cfg, lib, spec=None, rng=None, primitives=None, trace=False):
        self.map = arena_map
        self.cfg = cfg
        self.lib = lib
        self.primitives = primitives
        self.ledger = spec.ledger() if spec is not None else FitnessLedger(())
        self.rng = as_generator(rng)
        self.spawn_rng, self.human_rng = derive(self.rng, 2)
        self.dt = cfg.dt
        self.tick_index = 0
        self.zombies = []
        self.humans = []
        self.failed = {}
        self.trace = [] if trace else None
        self._agents = {}
        self._trees = {}
        self._contexts = {}
        self._chases = {}
        self._fov = math.radians(cfg.fov_degrees) / 2.0

    @property
    def time(self):
        return self.tick_index * self.dt

    @property
    def reach(self):
        """How close move tasks get before they count as arrived at a target."""
        return self.cfg.attack_range * 0.8

    def agent(self, agent_id):
        return self._agents.get(agent_id)

    def _spawn_point(self, cell):
        jitter = self.cfg.spawn_jitter
        x, y = center(cell)
        if jitter:
            x += self.spawn_rng.uniform(-jitter, jitter)
            y += self.spawn_rng.uniform(-jitter, jitter)
        return (x, y)

    def add_zombie(self, position, tree=None, heading=None):
        agent = AgentState('z%d' % len(self.zombies), ZOMBIE, position,
                           heading=self.spawn_rng.uniform(-math.pi, math.pi) if heading is None else heading,
                           health=self.cfg.max_health, blackboard=Blackboard(self.lib.blackboard))
        assert self.map.is_free_point(position), 'Zombie %s spawned inside an obstacle' % agent.id
        self.zombies.append(agent)
        self._agents[agent.id] = agent
        self.ledger.register(agent.id)
        self._chases[agent.id] = ChaseState()
        self._contexts[agent.id] = ZombieContext(self, agent, derive(self.rng, 1)[0])
        if tree is not None:
            self._trees[agent.id] = tree
        return agent

    def add_human(self, position, heading=0.0):
        agent = AgentState('h%d' % len(self.humans), HUMAN, position, heading=heading,
                           health=self.cfg.max_health, stamina=self.cfg.human.sprint_duration)
        assert self.map.is_free_point(position), 'Human %s spawned inside an obstacle' % agent.id
        self.humans.append(agent)
        self._agents[agent.id] = agent
        return agent

    def populate(self, trees, human_count):
        """Spawn one zombie per chromosome and ``human_count`` humans.

        A chromosome that fails to compile gives an inert zombie recorded in
        :attr:`failed`.
        """
        spawns = self.map.zombie_spawns
        for index, genome in enumerate(trees):
            try:
                instance = compile_tree(genome, self.lib, self.primitives)
            except CompileError as e:
                logger.debug('Zombie %d has a tree that does not compile: %s', index, e)
                instance = None
                self.failed['z%d' % index] = str(e)
            self.add_zombie(self._spawn_point(spawns[index % len(spawns)]), instance)
            if instance is not None:
                instance.owner = self.zombies[-1].id
        for _ in range(human_count):
            cell = self.map.human_spawns[int(self.spawn_rng.integers(len(self.map.human_spawns)))]
            self.add_human(self._spawn_point(cell), heading=self.spawn_rng.uniform(-math.pi, math.pi))
        return self

    # Movement requests

    def speed_of(self, agent):
        if agent.role == ZOMBIE:
            return self.cfg.zombie_speed * agent.speed_multiplier
        return self.cfg.human.speed

    def steer(self, agent, point, slide=True):
        """Head for ``point`` this tick without overshooting it."""
        distance = agent.distance_to(point)
        if distance <= 1e-12:
            agent.stop()
            return
        step = min(self.speed_of(agent), distance / self.dt)
        agent.desired = ((point[0] - agent.x) / distance * step, (point[1] - agent.y) / distance * step)
        agent.slide = slide

    def follow_path(self, agent, memory, goal):
        """Walk a grid path toward ``goal``; the path is replanned when the goal changes cell."""
        goal = tuple(goal)
        if agent.distance_to(goal) <= self.cfg.arrival_radius:
            agent.stop()
            return SUCCESS
        goal_cell = cell_of(goal)
        if memory.get('goal_cell') != goal_cell or not memory.get('points'):
            try:
                cells = find_path(self.map, cell_of(agent.position), goal_cell)
            except BlockedStart:
                return FAILURE
            if cells is None:
                return FAILURE
            memory['points'] = [center(cell) for cell in cells[:-1]] + [goal]
            memory['goal_cell'] = goal_cell
        else:
            memory['points'][-1] = goal
        points = memory['points']
        while len(points) > 1 and agent.distance_to(points[0]) < 0.05:
            points.pop(0)
        self.steer(agent, points[0], slide=True)
        return RUNNING

    # Perception

    def can_see(self, observer, point):
        distance = observer.distance_to(point)
        if distance > self.cfg.perception_radius:
            return False
        if distance > 1e-9 and angle_between(observer.heading, observer.bearing_to(point)) > self._fov:
            return False
        return self.map.line_of_sight(observer.position, point)

    def _perceive(self):
        now = self.time
        for zombie in self.zombies:
            context = self._contexts[zombie.id]
            seen, nearest = None, math.inf
            for human in self.humans:
                if human.alive and self.can_see(zombie, human.position):
                    distance = zombie.distance_to(human.position)
                    if distance < nearest:
                        seen, nearest = human, distance
            if seen is not None:
                context.write(SENSED_PLAYER, seen.id)
                context.write(TARGET_ENEMY, seen.id)
                context.write(LAST_KNOWN_ENEMY_LOCATION, seen.position)
                zombie.target_seen_at = now
                continue
            context.write(SENSED_PLAYER, None)
            target_id = context.read(TARGET_ENEMY)
            if target_id is not None:
                target = self.agent(target_id)
                expired = zombie.target_seen_at is None \
                    or now - zombie.target_seen_at > self.cfg.target_memory + 1e-9
                if target is None or not target.alive or expired:
                    context.write(TARGET_ENEMY, None)

    # Physics

    def _integrate(self, agent):
        agent.prev_x, agent.prev_y = agent.x, agent.y
        agent.blocked = False
        agent.last_moved = 0.0
        vx, vy = agent.desired
        if not agent.alive or (vx == 0.0 and vy == 0.0):
            return
        nx, ny = agent.x + vx * self.dt, agent.y + vy * self.dt
        if self.map.is_free_point((nx, ny)):
            agent.x, agent.y = nx, ny
        else:
            agent.blocked = True
            if agent.slide:
                if self.map.is_free_point((nx, agent.y)):
                    agent.x = nx
                elif self.map.is_free_point((agent.x, ny)):
                    agent.y = ny
        dx, dy = agent.displacement
        agent.last_moved = math.hypot(dx, dy)
        if agent.last_moved > self.cfg.idle_epsilon:
            agent.heading = math.atan2(dy, dx)

    def _respawn(self, human):
        free = self.map.free_cells()
        cell = None
        for _ in range(20):
            cell = free[int(self.spawn_rng.integers(len(free)))]
            point = center(cell)
            if all(z.distance_to(point) >= self.cfg.perception_radius for z in self.zombies):
                break
        human.x, human.y = self._spawn_point(cell)
        human.prev_x, human.prev_y = human.x, human.y
        human.health = self.cfg.max_health
        human.stamina = self.cfg.human.sprint_duration
        human.alive = True
        human.goal = None
        human.replan_timer = 0.0
        human.events.append('respawned')

    def _apply_damage(self):
        amount = self.cfg.damage_per_second * self.dt
        for zombie in self.zombies:
            if zombie.id in self.failed:
                continue
            victim, nearest = None, math.inf
            for human in self.humans:
                if human.alive:
                    distance = zombie.distance_to(human.position)
                    if distance <= self.cfg.attack_range and distance < nearest:
                        victim, nearest = human, distance
            if victim is None:
                continue
            dealt = min(amount, victim.health)
            victim.health -= dealt
            victim.damage_taken += dealt
            self._emit(zombie, 'damage_dealt', dealt)
            if victim.health <= 1e-9:
                victim.health = 0.0
                victim.alive = False
                victim.respawn_timer = self.cfg.respawn_delay
                victim.stop()
                victim.events.append('killed')
                zombie.events.append('kill:%s' % victim.id)

    # Fitness events

    def _emit(self, agent, key, delta):
        if self.ledger.declares(key):
            self.ledger.record_event(agent.id, key, delta)

    def _score_tick(self):
        cfg = self.cfg
        for zombie in self.zombies:
            if zombie.id in self.failed:
                continue
            if zombie.last_moved < cfg.idle_epsilon:
                self._emit(zombie, 'idle_ticks', 1)
            else:
                self._emit(zombie, 'distance_patrolled', zombie.last_moved)

            state = self._chases[zombie.id]
            event = chase_detector_step(zombie, self.humans, state, cfg.chase)
            if event == CHASE_STARTED:
                self._emit(zombie, 'chase_restarts', 1)
                if state.starts > cfg.chase.restart_allowance:
                    self._emit(zombie, 'excess_chase_restarts', 1)
            if event is not None:
                zombie.events.append(event)
            if state.active:
                self._emit(zombie, 'chase_ticks', 1)

            context = self._contexts[zombie.id]
            last_known = context.read(LAST_KNOWN_ENEMY_LOCATION)
            if context.read(SENSED_PLAYER) is None and last_known is not None \
                    and zombie.distance_to(last_known) <= cfg.near_last_known_radius:
                self._emit(zombie, 'near_last_known_ticks', 1)

    def _record_trace(self):
        for agent in self.zombies + self.humans:
            self.trace.append((
                self.tick_index, agent.id, agent.role,
                '%.6f' % agent.x, '%.6f' % agent.y, '%.6f' % agent.health,
                ';'.join(agent.events),
            ))

    def step(self):
        """Advance the world by one ``dt``."""
        dt = self.dt
        for agent in self.zombies + self.humans:
            agent.events = []
        for human in self.humans:
            if not human.alive:
                human.respawn_timer -= dt
                if human.respawn_timer <= 1e-9:
                    self._respawn(human)

        self._perceive()
        for human in self.humans:
            human.desired = (0.0, 0.0)
            if human.alive:
                human.desired = human_controller_step(human, self, self.cfg.human, self.human_rng).velocity
                human.slide = True
        now = self.time
        for zombie in self.zombies:
            zombie.stop()
            zombie.slide = True
            instance = self._trees.get(zombie.id)
            if instance is not None:
                context = self._contexts[zombie.id]
                context.time = now
                tick(instance, context, dt)

        for agent in self.zombies + self.humans:
            self._integrate(agent)
        self._apply_damage()
        self._score_tick()
        if self.trace is not None:
            self._record_trace()
        self.tick_index += 1

    def run(self, ticks=None):
        for _ in range(self.cfg.ticks if ticks is None else ticks):
            self.step()
        return self

    def result(self):
        return EpisodeResult(self.ledger, self.trace, dict(self.failed),
                             {h.id: h.damage_taken for h in self.humans})


def run_episode(trees, arena_map, cfg, lib, spec, rng, human_count=3, trace=False, primitives=None):
    """Simulate one episode with one zombie per chromosome in ``trees``.

    Returns an :class:`EpisodeResult`; ``result.ledger`` covers every zombie
    (``z0``, ``z1``, ... in tree order) and ``result.failed`` names zombies
    whose tree did not compile.
    """
    started = time.perf_counter()
    arena = Arena(arena_map, cfg, lib, spec, as_generator(rng), primitives, trace)
    arena.populate(trees, human_count).run()
    logger.debug('Episode of %d zombies and %d humans on %s took %.2fs (path cache %d entries)',
                 len(trees), human_count, arena_map.name, time.perf_counter() - started,
                 len(arena_map.path_cache))
    return arena.result()


def write_trace(rows, path):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(TRACE_COLUMNS)
        writer.writerows(rows)
