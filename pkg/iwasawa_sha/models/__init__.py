"""Pydantic models"""
from .sim import SimConfig, FormalGroupConfig
from .report import CheckResult, StructureChecks, TrialRecord, TableRow, RunReport
