import math
import os

import numpy as np

from ..arena.agents import HUMAN, LAST_KNOWN_ENEMY_LOCATION, SENSED_PLAYER, TARGET_ENEMY, ZOMBIE, AgentState
from ..arena.chase import CHASE_BROKEN, CHASE_STARTED, ChaseConfig, ChaseState, chase_detector_step
from ..arena.humans import HumanConfig, human_controller_step
from ..arena.maps import ArenaMap, load_preset
from ..arena.simulation import Arena, SimConfig, run_episode, write_trace
from ..behavior_tree import compile_tree
from ..chromosome import Chromosome, composite, task
from ..exceptions import ConfigError, MapError
from ..experiment import load_tree_preset
from ..fitness import bundled_spec
from ..library import NodeLibrary
from .testcase import BTEvolveTestCase, open_map

STILL_HUMANS = SimConfig(spawn_jitter=0.0, human=HumanConfig(speed=0.0))


class ArenaTestCase(BTEvolveTestCase):

    def setUp(self):
        super(ArenaTestCase, self).setUp()
        self.library = NodeLibrary.default()
        self.spec = bundled_spec()

    def arena(self, arena_map, cfg=STILL_HUMANS):
        return Arena(arena_map, cfg, self.library, self.spec, np.random.default_rng(5))

    def compiled(self, *tasks):
        return compile_tree(Chromosome(composite('selector', *[task(name) for name in tasks])), self.library)


class MapTest(BTEvolveTestCase):

    TEXT = '\n'.join([
        'name: tiny',
        'size: 5x4',
        '#####',
        '#Z.W#',
        '#..H#',
        '#####',
    ])

    def test_parse(self):
        arena_map = ArenaMap.parse(self.TEXT).validate()
        self.assertEqual((arena_map.width, arena_map.height), (5, 4))
        self.assertEqual(arena_map.zombie_spawns, ((1, 1),))
        self.assertEqual(arena_map.human_spawns, ((3, 2),))
        self.assertEqual(arena_map.waypoints, ((3, 1),))
        self.assertTrue(arena_map.is_blocked((0, 0)))
        self.assertTrue(arena_map.is_blocked((9, 9)))
        self.assertFalse(arena_map.is_blocked((2, 2)))

    def test_to_text_round_trip(self):
        arena_map = load_preset('small')
        text = arena_map.to_text()
        again = ArenaMap.parse(text)
        self.assertEqual(again.to_text(), text)
        self.assertEqual(again.blocked, arena_map.blocked)

    def test_malformed(self):
        for text in ('size: 5x4\n#####', 'name: x\nsize: fivexfour', 'name: x\nsize: 3x1\n##',
                     'name: x\nsize: 3x1\n#?#'):
            with self.assertRaises(MapError):
                ArenaMap.parse(text)

    def test_validation(self):
        with self.assertRaises(MapError):
            ArenaMap('nospawn', 4, 4, ()).validate()
        with self.assertRaises(MapError):
            ArenaMap('blocked', 4, 4, [(1, 1)], zombie_spawns=[(1, 1)], human_spawns=[(2, 2)]).validate()
        split = open_map(7, 5, blocked=[(3, y) for y in range(5)])
        with self.assertRaises(MapError):
            split.validate()
        self.assertIsInstance(MapError('x'), ConfigError)

    def test_presets(self):
        for name in ('small', 'medium', 'large'):
            arena_map = load_preset(name)
            self.assertTrue(arena_map.zombie_spawns and arena_map.human_spawns)
        medium = load_preset('medium')
        self.assertEqual((medium.width, medium.height), (32, 32))
        self.assertEqual(len(medium.zombie_spawns), 4 * len(load_preset('small').zombie_spawns))

    def test_tile_opens_seams_and_keeps_border(self):
        medium = load_preset('small').tile(2, 2)
        self.assertTrue(all(medium.is_blocked((x, 0)) and medium.is_blocked((x, 31)) for x in range(32)))
        self.assertTrue(all(medium.is_blocked((0, y)) and medium.is_blocked((31, y)) for y in range(32)))
        self.assertFalse(medium.is_blocked((15, 1)))
        self.assertFalse(medium.is_blocked((16, 1)))
        closed = load_preset('small').tile(2, 1, open_seams=False)
        self.assertTrue(closed.is_blocked((15, 1)))


class EpisodeTest(ArenaTestCase):

    def test_do_nothing_trees_idle_all_episode(self):
        cfg = SimConfig(episode_length=5.0)
        trees = [load_tree_preset('do-nothing')] * 3
        result = run_episode(trees, open_map(10, 10), cfg, self.library, self.spec, 1, human_count=0)
        for agent_id in ('z0', 'z1', 'z2'):
            self.assertEqual(result.ledger.value(agent_id, 'idle_ticks'), cfg.ticks)
            self.assertEqual(result.ledger.value(agent_id, 'damage_dealt'), 0.0)
            self.assertEqual(result.ledger.value(agent_id, 'distance_patrolled'), 0.0)
        self.assertEqual(cfg.ticks, 50)

    def test_uncompilable_tree_is_inert(self):
        trees = [Chromosome(composite('selector', task('no_such_task'))), load_tree_preset('do-nothing')]
        result = run_episode(trees, open_map(10, 10), SimConfig(episode_length=1.0), self.library, self.spec, 1,
                             human_count=0)
        self.assertEqual(list(result.failed), ['z0'])
        self.assertEqual(result.ledger.values('z0'), dict.fromkeys(self.spec.keys, 0.0))
        self.assertEqual(result.ledger.value('z1', 'idle_ticks'), 10)

    def test_deterministic(self):
        cfg = SimConfig(episode_length=20.0)
        trees = [load_tree_preset('manual-r3')] * 4
        first = run_episode(trees, load_preset('small'), cfg, self.library, self.spec, 7, trace=True)
        second = run_episode(trees, load_preset('small'), cfg, self.library, self.spec, 7, trace=True)
        self.assertEqual(first.ledger.to_dict(), second.ledger.to_dict())
        self.assertEqual(first.trace, second.trace)
        other = run_episode(trees, load_preset('small'), cfg, self.library, self.spec, 8, trace=True)
        self.assertNotEqual(first.trace, other.trace)

    def test_collision_and_damage_conservation(self):
        cfg = SimConfig(episode_length=30.0)
        arena_map = load_preset('small')
        trees = [load_tree_preset('manual-r3'), load_tree_preset('manual-r1'), load_tree_preset('degraded')] * 2
        result = run_episode(trees, arena_map, cfg, self.library, self.spec, 3, trace=True)
        for row in result.trace:
            self.assertTrue(arena_map.is_free_point((float(row[3]), float(row[4]))), row)
        self.assertAlmostEqual(result.ledger.total('damage_dealt'), sum(result.damage_taken.values()))
        for agent_id in result.ledger.agents():
            restarts = result.ledger.value(agent_id, 'chase_restarts')
            self.assertEqual(result.ledger.value(agent_id, 'excess_chase_restarts'),
                             max(0, restarts - cfg.chase.restart_allowance))

    def test_trace_file(self):
        result = run_episode([load_tree_preset('manual-r1')] * 2, load_preset('small'), SimConfig(episode_length=1.0),
                             self.library, self.spec, 1, human_count=1, trace=True)
        path = os.path.join(self.make_tempdir(), 'trace.csv')
        write_trace(result.trace, path)
        with open(path) as f:
            lines = f.read().splitlines()
        self.assertEqual(lines[0], 'tick,agent_id,role,x,y,health,event')
        self.assertEqual(len(lines), 1 + 10 * 3)

    def test_config_validation(self):
        with self.assertRaises(ConfigError):
            SimConfig(dt=0.0)
        with self.assertRaises(ConfigError):
            SimConfig(episode_length=1.05, dt=0.1)
        with self.assertRaises(ConfigError):
            SimConfig.from_dict({'gravity': 9.8})
        cfg = SimConfig.from_dict({'dt': 0.05, 'human': {'speed': 1.0}, 'chase': {'min_ticks': 4}})
        self.assertEqual(SimConfig.from_dict(cfg.to_dict()), cfg)
        self.assertEqual(cfg.ticks, 1200)


class DamageTest(ArenaTestCase):

    def test_damage_accrues_until_death(self):
        arena = self.arena(open_map(8, 8))
        zombie = arena.add_zombie((1.5, 1.5), self.compiled('idle'))
        human = arena.add_human((2.0, 1.5))
        arena.run(10)
        self.assertAlmostEqual(human.health, 75.0)
        self.assertAlmostEqual(arena.ledger.value(zombie.id, 'damage_dealt'), 25.0)
        arena.run(30)
        self.assertFalse(human.alive)
        self.assertEqual(human.health, 0.0)
        self.assertAlmostEqual(arena.ledger.value(zombie.id, 'damage_dealt'), 100.0)
        self.assertAlmostEqual(human.damage_taken, 100.0)

    def test_respawn(self):
        arena = self.arena(open_map(20, 20))
        arena.add_zombie((1.5, 1.5), self.compiled('idle'))
        human = arena.add_human((2.0, 1.5))
        arena.run(40)
        self.assertFalse(human.alive)
        arena.run(int(round(arena.cfg.respawn_delay / arena.dt)))
        self.assertTrue(human.alive)
        self.assertEqual(human.health, arena.cfg.max_health)

    def test_out_of_range_deals_nothing(self):
        arena = self.arena(open_map(8, 8))
        zombie = arena.add_zombie((1.5, 1.5), self.compiled('idle'))
        arena.add_human((5.5, 5.5))
        arena.run(20)
        self.assertEqual(arena.ledger.value(zombie.id, 'damage_dealt'), 0.0)
        self.assertEqual(arena.ledger.value(zombie.id, 'idle_ticks'), 20)


class PerceptionTest(ArenaTestCase):

    def test_nearest_visible_human_is_sensed(self):
        arena = self.arena(open_map(15, 15))
        zombie = arena.add_zombie((3.5, 7.5), heading=0.0)
        arena.add_human((9.5, 7.5))
        near = arena.add_human((6.5, 7.5))
        arena.add_human((2.0, 7.5))
        arena.step()
        self.assertEqual(zombie.blackboard.get(SENSED_PLAYER), near.id)
        self.assertEqual(zombie.blackboard.get(TARGET_ENEMY), near.id)
        self.assertEqual(zombie.blackboard.get(LAST_KNOWN_ENEMY_LOCATION), near.position)

    def test_walls_hide_humans(self):
        arena = self.arena(open_map(15, 15, blocked=[(6, y) for y in range(15)]))
        zombie = arena.add_zombie((3.5, 7.5), heading=0.0)
        arena.add_human((9.5, 7.5))
        arena.step()
        self.assertIsNone(zombie.blackboard.get(SENSED_PLAYER))

    def test_target_is_forgotten(self):
        arena = self.arena(open_map(15, 15))
        zombie = arena.add_zombie((3.5, 7.5), heading=0.0)
        human = arena.add_human((6.5, 7.5))
        arena.step()
        human.x, human.y = 12.5, 12.5
        zombie.heading = math.pi
        arena.step()
        self.assertIsNone(zombie.blackboard.get(SENSED_PLAYER))
        self.assertEqual(zombie.blackboard.get(TARGET_ENEMY), human.id)
        arena.run(int(round(arena.cfg.target_memory / arena.dt)) + 1)
        self.assertIsNone(zombie.blackboard.get(TARGET_ENEMY))
        self.assertEqual(zombie.blackboard.get(LAST_KNOWN_ENEMY_LOCATION), (6.5, 7.5))


class MovementTest(ArenaTestCase):
    """A wall between a zombie and the spot it wants to reach."""

    def setUp(self):
        super(MovementTest, self).setUp()
        self.map = open_map(12, 9, blocked=[(6, y) for y in range(1, 7)])
        self.cfg = SimConfig(spawn_jitter=0.0, target_memory=1000.0, damage_per_second=0.0,
                             human=HumanConfig(speed=0.0))

    def chase(self, task_name):
        arena = self.arena(self.map, self.cfg)
        zombie = arena.add_zombie((3.5, 4.5), self.compiled(task_name), heading=math.pi / 2)
        human = arena.add_human((9.5, 4.5))
        zombie.blackboard.set(TARGET_ENEMY, human.id)
        zombie.blackboard.set(LAST_KNOWN_ENEMY_LOCATION, human.position)
        zombie.target_seen_at = 0.0
        arena.run(150)
        return zombie

    def test_straight_move_stops_at_the_wall(self):
        zombie = self.chase('move_toward_target_enemy')
        self.assertLess(zombie.x, 6.0)
        self.assertGreater(zombie.x, 5.0)

    def test_path_move_rounds_the_wall(self):
        zombie = self.chase('move_to_last_known_enemy_location')
        self.assertLessEqual(zombie.distance_to((9.5, 4.5)), self.cfg.arrival_radius + 1e-9)


class ChaseDetectorTest(BTEvolveTestCase):

    def setUp(self):
        super(ChaseDetectorTest, self).setUp()
        self.cfg = ChaseConfig()
        self.zombie = AgentState('z0', ZOMBIE, (14.5, 0.0))
        self.humans = [AgentState('h0', HUMAN, (20.0, 0.0))]
        self.state = ChaseState()

    def move_to(self, x):
        self.zombie.prev_x, self.zombie.prev_y = self.zombie.x, self.zombie.y
        self.zombie.x = x
        return chase_detector_step(self.zombie, self.humans, self.state, self.cfg)

    def test_stationary(self):
        events = [self.move_to(14.5) for _ in range(100)]
        self.assertEqual(events, [None] * 100)

    def test_straight_approach(self):
        events = [self.move_to(14.5 + 0.02 * i) for i in range(1, 200)]
        self.assertEqual(events.count(CHASE_STARTED), 1)
        self.assertEqual(events.index(CHASE_STARTED), self.cfg.min_ticks - 1)
        self.assertNotIn(CHASE_BROKEN, events)

    def test_approach_and_retreat_cycles(self):
        events = []
        for _ in range(20):
            events += [self.move_to(14.5 + 0.1 * i) for i in range(1, 16)]
            events += [self.move_to(16.0 - 0.1 * i) for i in range(1, 16)]
        events = [event for event in events if event]
        self.assertEqual(events, [CHASE_STARTED, CHASE_BROKEN] * 20)
        self.assertEqual(self.state.starts, 20)

    def test_out_of_range_is_no_chase(self):
        self.humans[0].x = 40.0
        events = [self.move_to(14.5 + 0.1 * i) for i in range(1, 50)]
        self.assertEqual(events, [None] * 49)

    def test_config_bounds(self):
        with self.assertRaises(ConfigError):
            ChaseConfig(angle_threshold=0.0)
        with self.assertRaises(ConfigError):
            ChaseConfig(min_ticks=0)


class HumanControllerTest(ArenaTestCase):

    def test_flees_an_adjacent_zombie(self):
        arena = self.arena(open_map(21, 21), SimConfig())
        zombie = arena.add_zombie((11.5, 10.5), heading=math.pi)
        human = arena.add_human((10.5, 10.5))
        farther = 0
        for seed in range(1000):
            human.goal = None
            command = human_controller_step(human, arena, arena.cfg.human, np.random.default_rng(seed))
            if command.goal is not None and zombie.distance_to(command.goal) > zombie.distance_to(human.position):
                farther += 1
        self.assertGreaterEqual(farther, 950)

    def test_sprints_only_with_stamina(self):
        arena = self.arena(open_map(21, 21), SimConfig())
        zombie = arena.add_zombie((12.5, 10.5), heading=math.pi)
        zombie.prev_x = 12.7
        human = arena.add_human((10.5, 10.5))
        cfg = arena.cfg.human
        command = human_controller_step(human, arena, cfg, self.rng)
        self.assertTrue(command.sprinting)
        self.assertAlmostEqual(command.speed, cfg.speed * cfg.sprint_multiplier)
        human.stamina = 0.0
        command = human_controller_step(human, arena, cfg, self.rng)
        self.assertFalse(command.sprinting)
        self.assertEqual(command.speed, cfg.speed)

    def test_wanders_without_zombies(self):
        arena = self.arena(open_map(21, 21), SimConfig())
        human = arena.add_human((10.5, 10.5))
        command = human_controller_step(human, arena, arena.cfg.human, self.rng)
        self.assertIsNotNone(command.goal)
        self.assertTrue(arena.map.is_free_point(command.goal))
        self.assertLessEqual(math.hypot(*command.velocity), arena.cfg.human.speed + 1e-9)
        self.assertFalse(command.sprinting)


class WanderTest(ArenaTestCase):

    def test_step_forward_keeps_moving_in_a_closed_room(self):
        arena_map = open_map(10, 10, blocked=[(4, 4), (5, 4)])
        arena = self.arena(arena_map)
        zombie = arena.add_zombie((2.5, 2.5), self.compiled('step_forward'), heading=math.pi)
        positions = []
        for _ in range(300):
            arena.step()
            positions.append(zombie.position)
        self.assertTrue(all(arena_map.is_free_point(p) for p in positions))
        self.assertLess(arena.ledger.value(zombie.id, 'idle_ticks'), 60)
        self.assertGreater(arena.ledger.value(zombie.id, 'distance_patrolled'), 30.0)

    def test_step_forward_turns_away_from_a_dead_end(self):
        arena = self.arena(open_map(10, 10))
        zombie = arena.add_zombie((1.5, 5.5), self.compiled('step_forward'), heading=math.pi)
        arena.run(20)
        self.assertLessEqual(arena.ledger.value(zombie.id, 'idle_ticks'), 3)
        self.assertGreater(arena.ledger.value(zombie.id, 'distance_patrolled'), 2.0)
