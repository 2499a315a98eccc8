# smmimo_sim/sim_tools/topology/models.py
"""Scenario value types: CCM blocks, physical nodes, antennas and UTs."""

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from sim_tools.topology.config import ScenarioConfig

Position = Tuple[float, float]


@dataclass(frozen=True)
class CcmBlock:
    """One computational and communication module of a PN."""
    id: int
    radio_count: int
    antenna_ids: Tuple[int, ...]
    compute_units: int = 8
    storage_units: int = 8
    post_passed: bool = True


@dataclass(frozen=True)
class PhysicalNode:
    id: int
    position: Position
    blocks: Tuple[CcmBlock, ...]
    radio_range_m: float

    @property
    def total_antennas(self) -> int:
        return sum(block.radio_count for block in self.blocks)

    @property
    def antenna_ids(self) -> Tuple[int, ...]:
        return tuple(a for block in self.blocks for a in block.antenna_ids)

    @property
    def master_block(self) -> CcmBlock:
        return self.blocks[0]

    @property
    def block_ids(self) -> Tuple[int, ...]:
        return tuple(block.id for block in self.blocks)


@dataclass(frozen=True)
class Antenna:
    id: int
    pn_id: int
    block_id: int
    position: Position


@dataclass(frozen=True)
class UserTerminal:
    id: int
    position: Position
    tx_power: float = 1.0


@dataclass(frozen=True)
class Scenario:
    """
    A placed scenario.

    Antenna ids are global and contiguous per PN:
    antenna id = pn_id * antennas_per_pn + local index.
    """
    config: ScenarioConfig
    seed: int
    pns: Tuple[PhysicalNode, ...]
    antennas: Tuple[Antenna, ...]
    uts: Tuple[UserTerminal, ...]
    pn_positions: np.ndarray = field(repr=False, compare=False)
    antenna_positions: np.ndarray = field(repr=False, compare=False)
    ut_positions: np.ndarray = field(repr=False, compare=False)

    @property
    def antenna_count(self) -> int:
        return len(self.antennas)

    @property
    def ut_count(self) -> int:
        return len(self.uts)

    def pn_of_antenna(self, antenna_id: int) -> int:
        return antenna_id // self.config.antennas_per_pn

    def antennas_of_pn(self, pn_id: int) -> np.ndarray:
        per_pn = self.config.antennas_per_pn
        return np.arange(pn_id * per_pn, (pn_id + 1) * per_pn)
