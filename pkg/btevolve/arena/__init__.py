from .maps import ArenaMap, load_preset, resolve_map  # noqa
from .pathfinding import find_path, path_cost  # noqa
from .chase import ChaseConfig, ChaseState, chase_detector_step  # noqa
from .humans import HumanConfig, human_controller_step  # noqa
from .simulation import Arena, EpisodeResult, SimConfig, run_episode, write_trace  # noqa
