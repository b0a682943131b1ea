"""Report models"""
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

Scalar = Union[int, str, bool, None]


class CheckResult(BaseModel):
    name: str
    passed: bool
    expected: Scalar = None
    actual: Scalar = None
    detail: Optional[str] = None


class StructureChecks(BaseModel):
    vanishing: bool
    membership: bool
    profile_match: bool

    @property
    def passed(self) -> bool:
        return self.vanishing and self.membership and self.profile_match


class TrialRecord(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    trial: int
    p: int
    a_p: int
    n: int
    seed: int
    precision: int
    mu: int
    lambda_: int = Field(..., alias="lambda")
    q_n: int
    order_exponent: Optional[int]
    e_n: int
    structure: List[int] = Field(default_factory=list)
    char_valuation: Optional[str] = None
    structure_checks: Optional[StructureChecks] = None


class TableRow(BaseModel):
    n: int
    q_n: int
    e_n: int
    e_prev_plus_q: int


class RunReport(BaseModel):
    command: str
    config: Dict[str, Any]
    checks: List[CheckResult] = Field(default_factory=list)
    records: List[Dict[str, Any]] = Field(default_factory=list)
    passed: bool = True
    exit_code: int = 0
    values: Dict[str, Any] = Field(default_factory=dict)
    timing: Dict[str, float] = Field(default_factory=dict)
