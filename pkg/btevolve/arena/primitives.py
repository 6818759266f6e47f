"""Task and decorator primitives of the zombie node roster.

Primitives only decide actions: they read the blackboard the arena fills
through perception and request movement through the arena. They never pick
targets or deal damage themselves.
"""
import math

from ..behavior_tree import FAILURE, RUNNING, SUCCESS, DecoratorPrimitive, PrimitiveTable, TickContext
from .agents import (CURRENT_WAYPOINT, LAST_KNOWN_ENEMY_LOCATION, SENSED_PLAYER, TARGET_ENEMY, angle_between,
                     normalize_angle)
from .maps import cell_of, center

PRIMITIVES = PrimitiveTable()


class ZombieContext(TickContext):
    """Tick context of one zombie: its blackboard plus the arena it lives in."""

    def __init__(self, arena, agent, rng):
        super(ZombieContext, self).__init__(agent.blackboard, arena.time, rng)
        self.arena = arena
        self.agent = agent

    def read(self, key):
        blackboard = self.blackboard
        return blackboard.get(key) if key in blackboard else None

    def write(self, key, value):
        if key in self.blackboard:
            self.blackboard.set(key, value)
            return True
        return False

    def target(self, key=TARGET_ENEMY):
        """The live agent named by an entity key, or ``None``."""
        agent_id = self.read(key)
        if agent_id is None:
            return None
        other = self.arena.agent(agent_id)
        return other if other is not None and other.alive else None

    def enemy_position(self):
        target = self.target()
        if target is not None:
            return target.position
        return self.read(LAST_KNOWN_ENEMY_LOCATION)


def _random_point_near(context, origin, radius, attempts=8):
    arena_map = context.arena.map
    for _ in range(attempts):
        r = radius * math.sqrt(context.rng.random())
        theta = context.rng.uniform(0.0, 2.0 * math.pi)
        point = (origin[0] + r * math.cos(theta), origin[1] + r * math.sin(theta))
        if arena_map.is_free_point(point):
            return point
    return None


# Tasks

@PRIMITIVES.task('find_bot_waypoint')
def find_bot_waypoint(context, params, memory, dt):
    waypoints = [center(cell) for cell in context.arena.map.waypoints]
    if not waypoints:
        return FAILURE
    current = context.read(CURRENT_WAYPOINT)
    choices = [point for point in waypoints if point != current] or waypoints
    point = choices[int(context.rng.integers(len(choices)))]
    return SUCCESS if context.write(CURRENT_WAYPOINT, point) else FAILURE


@PRIMITIVES.task('find_patrol_location')
def find_patrol_location(context, params, memory, dt):
    point = _random_point_near(context, context.agent.position, params.get('radius', 5.0))
    if point is None:
        return FAILURE
    return SUCCESS if context.write(CURRENT_WAYPOINT, point) else FAILURE


def _move_to(context, memory, goal):
    if goal is None:
        return FAILURE
    return context.arena.follow_path(context.agent, memory, goal)


@PRIMITIVES.task('move_to_current_waypoint')
def move_to_current_waypoint(context, params, memory, dt):
    return _move_to(context, memory, context.read(CURRENT_WAYPOINT))


@PRIMITIVES.task('move_to_last_known_enemy_location')
def move_to_last_known_enemy_location(context, params, memory, dt):
    return _move_to(context, memory, context.read(LAST_KNOWN_ENEMY_LOCATION))


@PRIMITIVES.task('move_to_sensed_player')
def move_to_sensed_player(context, params, memory, dt):
    target = context.target(SENSED_PLAYER)
    if target is None:
        return FAILURE
    if context.agent.distance_to(target.position) <= context.arena.reach:
        context.agent.stop()
        return SUCCESS
    return _move_to(context, memory, target.position)


@PRIMITIVES.task('move_toward_target_enemy')
def move_toward_target_enemy(context, params, memory, dt):
    """Straight at the target without pathfinding; fails on hitting a wall."""
    target = context.target()
    agent = context.agent
    if target is None:
        return FAILURE
    if agent.distance_to(target.position) <= context.arena.reach:
        agent.stop()
        return SUCCESS
    if memory.get('started') and agent.blocked:
        return FAILURE
    memory['started'] = True
    context.arena.steer(agent, target.position, slide=False)
    return RUNNING


@PRIMITIVES.task('find_location_near_last_known_enemy')
def find_location_near_last_known_enemy(context, params, memory, dt):
    last_known = context.read(LAST_KNOWN_ENEMY_LOCATION)
    if last_known is None:
        return FAILURE
    point = _random_point_near(context, last_known, params.get('radius', 3.0))
    if point is None:
        return FAILURE
    return SUCCESS if context.write(CURRENT_WAYPOINT, point) else FAILURE


@PRIMITIVES.task('forget_last_known_enemy')
def forget_last_known_enemy(context, params, memory, dt):
    context.write(LAST_KNOWN_ENEMY_LOCATION, None)
    return SUCCESS


@PRIMITIVES.task('stop_moving')
def stop_moving(context, params, memory, dt):
    context.agent.stop()
    return SUCCESS


@PRIMITIVES.task('face_target')
def face_target(context, params, memory, dt):
    position = context.enemy_position()
    if position is None:
        return FAILURE
    context.agent.heading = context.agent.bearing_to(position)
    return SUCCESS


@PRIMITIVES.task('pick_random_heading')
def pick_random_heading(context, params, memory, dt):
    context.agent.heading = context.rng.uniform(-math.pi, math.pi)
    return SUCCESS


def _ahead(agent, distance):
    return (agent.x + distance * math.cos(agent.heading), agent.y + distance * math.sin(agent.heading))


@PRIMITIVES.task('step_forward')
def step_forward(context, params, memory, dt):
    """One tick of walking along the heading, sliding along walls.

    A zombie that made no progress against a wall last tick turns to a random
    heading first.
    """
    agent = context.agent
    if agent.blocked and agent.last_moved <= context.arena.cfg.idle_epsilon:
        agent.heading = context.rng.uniform(-math.pi, math.pi)
    context.arena.steer(agent, _ahead(agent, context.arena.speed_of(agent) * dt), slide=True)
    return SUCCESS


@PRIMITIVES.task('idle')
def idle(context, params, memory, dt):
    return SUCCESS


@PRIMITIVES.task('wait')
def wait(context, params, memory, dt):
    if 'elapsed' not in memory:
        memory['elapsed'] = 0.0
        return RUNNING
    memory['elapsed'] += dt
    if memory['elapsed'] >= params['duration'] - 1e-9:
        return SUCCESS
    return RUNNING


@PRIMITIVES.task('rotate_by')
def rotate_by(context, params, memory, dt):
    agent = context.agent
    agent.heading = normalize_angle(agent.heading + math.radians(params['angle']))
    return SUCCESS


@PRIMITIVES.task('move_distance')
def move_distance(context, params, memory, dt):
    """Walk ``distance`` cells along the heading, halting at walls."""
    agent = context.agent
    if 'travelled' in memory:
        memory['travelled'] += agent.last_moved
        if memory['travelled'] >= params['distance'] - 1e-9:
            return SUCCESS
        if agent.blocked:
            return FAILURE
    else:
        memory['travelled'] = 0.0
    remaining = params['distance'] - memory['travelled']
    context.arena.steer(agent, _ahead(agent, remaining), slide=False)
    return RUNNING


@PRIMITIVES.task('set_speed')
def set_speed(context, params, memory, dt):
    context.agent.speed_multiplier = params['multiplier']
    return SUCCESS


@PRIMITIVES.task('remember_point_offset')
def remember_point_offset(context, params, memory, dt):
    x, y = cell_of(context.agent.position)
    cell = (x + params['dx'], y + params['dy'])
    if context.arena.map.is_blocked(cell):
        return FAILURE
    return SUCCESS if context.write(CURRENT_WAYPOINT, center(cell)) else FAILURE


# Decorators

@PRIMITIVES.condition('has_sensed_enemy')
def has_sensed_enemy(context, params):
    return context.read(SENSED_PLAYER) is not None


@PRIMITIVES.condition('has_no_target_enemy')
def has_no_target_enemy(context, params):
    return context.read(TARGET_ENEMY) is None


@PRIMITIVES.condition('has_waypoint')
def has_waypoint(context, params):
    return context.read(CURRENT_WAYPOINT) is not None


@PRIMITIVES.condition('has_last_known_location')
def has_last_known_location(context, params):
    return context.read(LAST_KNOWN_ENEMY_LOCATION) is not None


@PRIMITIVES.condition('is_target_close')
def is_target_close(context, params):
    target = context.target()
    return target is not None and context.agent.distance_to(target.position) <= params.get('distance', 2.0)


@PRIMITIVES.condition('is_target_far')
def is_target_far(context, params):
    target = context.target()
    return target is not None and context.agent.distance_to(target.position) > params.get('distance', 6.0)


@PRIMITIVES.condition('is_moving')
def is_moving(context, params):
    return context.agent.last_moved > 1e-6


@PRIMITIVES.condition('is_waypoint_in_cone_to_enemy')
def is_waypoint_in_cone_to_enemy(context, params):
    waypoint = context.read(CURRENT_WAYPOINT)
    enemy = context.enemy_position()
    if waypoint is None or enemy is None:
        return False
    agent = context.agent
    cone = math.radians(params.get('cone_degrees', 45.0)) / 2.0
    return angle_between(agent.bearing_to(waypoint), agent.bearing_to(enemy)) <= cone


@PRIMITIVES.condition('distance_lt')
def distance_lt(context, params):
    position = context.enemy_position()
    return position is not None and context.agent.distance_to(position) < params['threshold']


@PRIMITIVES.condition('chance_gate')
def chance_gate(context, params):
    passed = context.rng.random() < params['p']
    return passed != params.get('invert', False)


@PRIMITIVES.condition('blackboard_key_set')
def blackboard_key_set(context, params):
    return context.read(params['key']) is not None


@PRIMITIVES.decorator('cooldown')
class Cooldown(DecoratorPrimitive):
    """Blocks its node for ``seconds`` after the node last completed."""

    def check(self, context, params, memory):
        return context.time >= memory.get('ready_at', -math.inf)

    def finished(self, context, params, memory):
        memory['ready_at'] = context.time + params['seconds']
