from .layered import EncodeOptions, InvalidOptions, emit_layered
from .deletefree import emit_delete_free
from .stepless import OccurrenceBag, SteplessModel, emit_stepless, decode_stepless

__all__ = [
    "EncodeOptions", "InvalidOptions", "emit_layered", "emit_delete_free",
    "OccurrenceBag", "SteplessModel", "emit_stepless", "decode_stepless",
]
