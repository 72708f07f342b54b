"""Workbench for the Nelsonian conditional logic N4CK and its relatives."""

from .syntax import Lang, expand, parse, to_text
from .kripke import (CondIntModel, CondNelsonModel, ModalModel, NelsonModel, validate)
from .semantics import Sign, eval_intck, eval_modal, eval_n4, eval_n4ck, truth_set
from .decide import Refuted, Valid, decide_n4
from .search import SearchBudget, find_countermodel
from .proofs import check_derivation, parse_derivation, script_corpus
from .translate import MappingId, apply, translate_proof

__all__ = [
    "Lang", "expand", "parse", "to_text",
    "CondIntModel", "CondNelsonModel", "ModalModel", "NelsonModel", "validate",
    "Sign", "eval_intck", "eval_modal", "eval_n4", "eval_n4ck", "truth_set",
    "Refuted", "Valid", "decide_n4",
    "SearchBudget", "find_countermodel",
    "check_derivation", "parse_derivation", "script_corpus",
    "MappingId", "apply", "translate_proof",
]
