"""Run configuration models"""
from typing import Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from iwasawa_sha.core.config import settings
from iwasawa_sha.services.padic import is_odd_prime


class SimConfig(BaseModel):
    p: int
    a_p: int = Field(0, description="Decimal, interpreted mod p^N")
    n_max: int = Field(..., ge=0)
    precision: Optional[int] = Field(None, ge=1, description="Overrides the automatic N")
    seed: int = Field(default_factory=lambda: settings.default_seed)
    trials: int = Field(default_factory=lambda: settings.default_trials, ge=1)
    jobs: int = Field(default_factory=lambda: settings.default_jobs, ge=1)
    unit_mode: Literal["random", "honda"] = "random"

    @field_validator('p')
    def p_odd_prime(cls, v):
        if not is_odd_prime(v):
            raise ValueError(f'p must be an odd prime >= 3, got {v}')
        return v

    @model_validator(mode='after')
    def a_p_supersingular(self):
        if self.a_p % self.p != 0:
            raise ValueError(f'a_p = {self.a_p} must be divisible by p = {self.p}')
        return self


class FormalGroupConfig(BaseModel):
    p: int
    a_p: int = 0
    degree: int = Field(20, ge=1)
    target: int = Field(10, ge=1)
    assoc_degree: int = Field(10, ge=1)

    @field_validator('p')
    def p_odd_prime(cls, v):
        if not is_odd_prime(v):
            raise ValueError(f'p must be an odd prime >= 3, got {v}')
        return v

    @model_validator(mode='after')
    def a_p_supersingular(self):
        if self.a_p % self.p != 0:
            raise ValueError(f'a_p = {self.a_p} must be divisible by p = {self.p}')
        return self
