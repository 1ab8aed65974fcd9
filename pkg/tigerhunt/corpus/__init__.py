from .format import CorpusCase, Expectation, load_cases, parse_case
from .quantities import QUANTITIES, Kind, Subject
from .runner import CaseReport, CorpusReport, CorpusRunner, Outcome, evaluate_case

__all__ = (
    "CaseReport",
    "CorpusCase",
    "CorpusReport",
    "CorpusRunner",
    "Expectation",
    "Kind",
    "Outcome",
    "QUANTITIES",
    "Subject",
    "evaluate_case",
    "load_cases",
    "parse_case",
)
