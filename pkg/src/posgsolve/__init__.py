"""Qualitative solvers for partial-observation stochastic reachability games."""
from .answer import LOSE, MODES, UNKNOWN, WIN, BudgetExceeded, QualitativeAnswer, ScopeError
from .game import (Game, SideInfo, build_game, buchi_to_reach, normalize, post_any, post_set,
                   reveal_p2_actions, validate)
from .fixtures import build_fixture
from .transducer import Transducer
from .textio import dump_game, dump_transducer, parse_game, parse_transducer
from .arena import ArenaGame, solve_buchi, solve_reach, solve_safety
from .belief import (belief_memoryless_insufficiency, build_h, extract_transducer, initial_pair,
                     legal_actions, solve_pure, succ_h)
from .antichain import cpre, insert, preceq, solve_symbolic
from .counting import (KLadder, abs_counting, bad_states, build_counting_game,
                       compose_restart_play, compute_z, safe_actions, solve_almost_sure_p1perfect,
                       solve_pos_reach_safe, succ_counting)
from .reductions import ReductionCertificate, pure_to_rand, rand_to_pure, transfer_strategy
from .oracle import (brute_force_decide, exact_prob, pomdp_almost_sure_safety, product,
                     qualitative_reach, verify_witness)

__version__ = "0.1.0"
