"""Shared evaluation context: world + oracle + pair law + feature matrices.

Building these tables once and passing the bundle around keeps every
per-representation computation a pure function of (spec, lab).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cube import CubeWorld, build_world
from .features import feature_matrix
from .info import InfoReport, PairLaw, report_from_encoding
from .oracle import OracleTables, load_or_compute
from .reps import RepresentationSpec, encode_matrix

__all__ = ["CubeLab"]


@dataclass(frozen=True)
class CubeLab:
    world: CubeWorld
    oracle: OracleTables
    law: PairLaw
    feats_valid: np.ndarray  # (P, 9) int16, rows follow law pair order
    feats_all: np.ndarray  # (S*G, 9) int16, row-major over (s, g)
    flat_valid: np.ndarray  # (P,) int64 indices into the (S*G) flattening

    @classmethod
    def build(cls, n: int = 4, oracle_cache: str | Path | None = None) -> "CubeLab":
        world = build_world(n)
        oracle = load_or_compute(world, oracle_cache)
        law = PairLaw.from_cube(world, oracle)
        S, G = world.n_states, world.n_goals
        all_s = np.repeat(np.arange(S, dtype=np.int64), G)
        all_g = np.tile(np.arange(G, dtype=np.int64), S)
        feats_all = feature_matrix(world, oracle, all_s, all_g)
        flat_valid = world.pair_flat(world.pair_state, world.pair_goal)
        return cls(
            world=world,
            oracle=oracle,
            law=law,
            feats_valid=feats_all[flat_valid],
            feats_all=feats_all,
            flat_valid=flat_valid,
        )

    @property
    def n(self) -> int:
        return self.world.n

    def encode_valid(self, spec: RepresentationSpec) -> np.ndarray:
        """(P, K) encodings over the filtered pairs."""
        return encode_matrix(spec, self.feats_valid)

    def encode_all(self, spec: RepresentationSpec) -> np.ndarray:
        """(S*G, K) encodings over every (state, goal) combination."""
        return encode_matrix(spec, self.feats_all)

    def z_cols(self, spec: RepresentationSpec) -> list[np.ndarray]:
        mat = self.encode_valid(spec)
        return [mat[:, k] for k in range(mat.shape[1])]

    def info_report(self, spec: RepresentationSpec) -> InfoReport:
        return report_from_encoding(self.law, self.z_cols(spec))
