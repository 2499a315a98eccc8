# smmimo_sim/sim_tools/topology/scenario.py
"""
Seeded scenario layout.

PNs, antenna offsets and UTs each draw from their own counter-based
stream, so changing ut_count never moves a PN and vice versa.
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.exceptions import ConfigValidationError, MissingSeed
from core.logger import get_logger
from core.rng import Stream, stream
from sim_tools.topology.config import ScenarioConfig, validate_config
from sim_tools.topology.models import Antenna, CcmBlock, PhysicalNode, Scenario, UserTerminal

logger = get_logger("topology.scenario")


def split_blocks(antennas_per_pn: int, blocks_per_pn: int) -> List[int]:
    """
    Radio count per CCM block, as even as possible.

    Example:
        >>> split_blocks(10, 4)
        [3, 3, 2, 2]
    """
    blocks = max(1, min(blocks_per_pn, antennas_per_pn))
    base, remainder = divmod(antennas_per_pn, blocks)
    return [base + (1 if b < remainder else 0) for b in range(blocks)]


def _as_positions(name: str, positions: Sequence[Sequence[float]], expected: int) -> np.ndarray:
    array = np.asarray(positions, dtype=np.float64).reshape(-1, 2) if len(positions) else np.zeros((0, 2))
    if array.shape[0] != expected:
        raise ConfigValidationError([f"{name} has {array.shape[0]} entries, expected {expected}"])
    return array


def _place_pns(config: ScenarioConfig, seed: int) -> np.ndarray:
    low = min(config.pn_aperture_m, config.region_extent_m / 2)
    high = max(config.region_extent_m - config.pn_aperture_m, low)
    return stream(seed, Stream.PN_LAYOUT).uniform(low, high, size=(config.pn_count, 2))


def _place_antennas(config: ScenarioConfig, seed: int, pn_id: int, center: np.ndarray) -> np.ndarray:
    draws = stream(seed, Stream.ANTENNA_LAYOUT, pn_id).uniform(size=(config.antennas_per_pn, 2))
    radius = config.pn_aperture_m * np.sqrt(draws[:, 0])
    angle = 2.0 * np.pi * draws[:, 1]
    offsets = np.column_stack((radius * np.cos(angle), radius * np.sin(angle)))
    # clipping toward a PN inside the region only shortens the offset
    return np.clip(center + offsets, 0.0, config.region_extent_m)


def build_scenario(
    config: ScenarioConfig,
    seed: Optional[int] = None,
    *,
    pn_positions: Optional[Sequence[Sequence[float]]] = None,
    ut_positions: Optional[Sequence[Sequence[float]]] = None,
) -> Scenario:
    """
    Place PNs, their CCM blocks and antennas, and UTs.

    Args:
        config: Scenario configuration (validated here)
        seed: Layout seed; defaults to config.seed
        pn_positions: Explicit PN centers, overriding the seeded layout
        ut_positions: Explicit UT positions, overriding the seeded layout

    Returns:
        Scenario, a pure function of (config, seed, overrides)

    Raises:
        ConfigValidationError: If the config violates an invariant
        MissingSeed: If neither seed nor config.seed is given

    Example:
        >>> scenario = build_scenario(ScenarioConfig(seed=7))
        >>> scenario.antenna_count, scenario.ut_count
        (4000, 400)
    """
    issues = validate_config(config)
    if issues:
        raise ConfigValidationError(issues)
    seed = config.seed if seed is None else seed
    if seed is None:
        raise MissingSeed()

    if pn_positions is None:
        pn_xy = _place_pns(config, seed)
    else:
        pn_xy = _as_positions("pn_positions", pn_positions, config.pn_count)

    if ut_positions is None:
        ut_xy = stream(seed, Stream.UT_LAYOUT).uniform(0.0, config.region_extent_m, size=(config.ut_count, 2))
    else:
        ut_xy = _as_positions("ut_positions", ut_positions, config.ut_count)

    radio_counts = split_blocks(config.antennas_per_pn, config.blocks_per_pn)
    pns: List[PhysicalNode] = []
    antennas: List[Antenna] = []
    antenna_xy = np.empty((config.pn_count * config.antennas_per_pn, 2))

    for pn_id in range(config.pn_count):
        first = pn_id * config.antennas_per_pn
        xy = _place_antennas(config, seed, pn_id, pn_xy[pn_id])
        antenna_xy[first:first + config.antennas_per_pn] = xy

        blocks: List[CcmBlock] = []
        cursor = first
        for block_id, radio_count in enumerate(radio_counts):
            ids = tuple(range(cursor, cursor + radio_count))
            blocks.append(CcmBlock(id=block_id, radio_count=radio_count, antenna_ids=ids))
            for antenna_id in ids:
                antennas.append(Antenna(
                    id=antenna_id,
                    pn_id=pn_id,
                    block_id=block_id,
                    position=(float(antenna_xy[antenna_id, 0]), float(antenna_xy[antenna_id, 1])),
                ))
            cursor += radio_count

        pns.append(PhysicalNode(
            id=pn_id,
            position=(float(pn_xy[pn_id, 0]), float(pn_xy[pn_id, 1])),
            blocks=tuple(blocks),
            radio_range_m=config.radio_range_m,
        ))

    uts: Tuple[UserTerminal, ...] = tuple(
        UserTerminal(id=i, position=(float(ut_xy[i, 0]), float(ut_xy[i, 1])))
        for i in range(config.ut_count)
    )

    logger.debug(
        f"Scenario placed: {config.pn_count} PNs, {len(antennas)} antennas, {len(uts)} UTs",
        extra={"seed": seed},
    )
    return Scenario(
        config=config,
        seed=seed,
        pns=tuple(pns),
        antennas=tuple(antennas),
        uts=uts,
        pn_positions=pn_xy,
        antenna_positions=antenna_xy,
        ut_positions=ut_xy,
    )
