from .backend import PRESETS, BackendError, ExternalBackend, InternalBackend, default_backend
from .bnb import branch_and_bound
from .lpformat import parse_solution, read_lp, write_lp, write_mst
from .model import Constraint, MilpModel, build_model, decode, encode_warm_start, objective_value, violated
from .solve import ExactResult, ExactStatus, solve_exact

__all__ = [
    "PRESETS", "BackendError", "ExternalBackend", "InternalBackend", "default_backend",
    "branch_and_bound", "parse_solution", "read_lp", "write_lp", "write_mst",
    "Constraint", "MilpModel", "build_model", "decode", "encode_warm_start",
    "objective_value", "violated", "ExactResult", "ExactStatus", "solve_exact",
]
