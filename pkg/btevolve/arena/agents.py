import math

ZOMBIE = 'zombie'
HUMAN = 'human'

# Blackboard keys the arena itself writes.
SENSED_PLAYER = 'sensed_player'
TARGET_ENEMY = 'target_enemy'
LAST_KNOWN_ENEMY_LOCATION = 'last_known_enemy_location'
CURRENT_WAYPOINT = 'current_waypoint'


class AgentState(object):
    """Mutable state of one character in the arena.

    Positions are continuous cell units, headings radians. ``desired`` is
    the velocity requested for the current tick; ``slide`` lets the move
    slide along walls instead of halting on contact.
    """

    def __init__(self, agent_id, role, position, heading=0.0, health=100.0, stamina=0.0, blackboard=None):
        self.id = agent_id
        self.role = role
        self.x, self.y = position
        self.prev_x, self.prev_y = position
        self.heading = heading
        self.health = health
        self.stamina = stamina
        self.blackboard = blackboard
        self.alive = True
        self.respawn_timer = 0.0
        self.speed_multiplier = 1.0
        self.desired = (0.0, 0.0)
        self.slide = True
        self.blocked = False
        self.last_moved = 0.0
        self.target_seen_at = None
        self.damage_taken = 0.0
        self.events = []
        # human controller state
        self.goal = None
        self.replan_timer = 0.0
        self.sprinting = False

    def __repr__(self):
        return '<AgentState %s (%.2f, %.2f)>' % (self.id, self.x, self.y)

    @property
    def position(self):
        return (self.x, self.y)

    @property
    def displacement(self):
        return (self.x - self.prev_x, self.y - self.prev_y)

    def distance_to(self, point):
        return math.hypot(point[0] - self.x, point[1] - self.y)

    def bearing_to(self, point):
        return math.atan2(point[1] - self.y, point[0] - self.x)

    def stop(self):
        self.desired = (0.0, 0.0)


def angle_between(a, b):
    """Absolute difference of two angles in radians, in [0, pi]."""
    diff = (a - b) % (2.0 * math.pi)
    return min(diff, 2.0 * math.pi - diff)


def normalize_angle(angle):
    return math.atan2(math.sin(angle), math.cos(angle))
