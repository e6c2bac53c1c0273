"""Goal-representation library: baselines, templates, sampling, encoding.

A representation is a deterministic encoder ``z = phi(s, g)`` described by a
`RepresentationSpec`: either one of four named baselines

    full       (h, t, dx1, dy1, dx2, dy2)
    signs      (h, t, sgn dx1, sgn dy1, sgn dx2, sgn dy2)
    value_only (v,)
    distances  (h, d_at, d_bg)

or a sampled instance of one of eleven templates (value_plus, dist_coarse,
dir_subset, dir_coarse, mixed_dir_dist, phase_split, proj_mod, two_hash,
hashed_actor, hashed_dist, drop_id).  Sampled parameters are recorded in the
spec and serialized into its id, so any spec can be re-evaluated exactly.

Encoding is a pure function of (spec, feature row); `encode_matrix` evaluates
a spec on a whole feature matrix at once.  Hashed templates use a fixed
polynomial rolling hash (multiplier 1000003, offset 17, component shift +64,
uint64 wraparound) so encodings are platform-independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import rng
from .cube import CubeState, CubeWorld, Goal
from .features import (
    DIR_COLS,
    DIRECTIONAL_TRANSFORMS,
    DISTANCE_TRANSFORMS,
    F_DAT,
    F_DBG,
    F_H,
    F_T,
    F_V,
    VALUE_TRANSFORMS,
    apply_transform,
    feature_matrix,
)
from .oracle import OracleTables

__all__ = [
    "BASELINE_NAMES",
    "RepresentationSpec",
    "TEMPLATE_NAMES",
    "TEMPLATE_WEIGHTS",
    "baseline",
    "encode",
    "encode_matrix",
    "sample_library",
    "spec_from_json",
    "spec_to_json",
]

BASELINE_NAMES = ("full", "signs", "value_only", "distances")
TEMPLATE_NAMES = (
    "value_plus",
    "dist_coarse",
    "dir_subset",
    "dir_coarse",
    "mixed_dir_dist",
    "phase_split",
    "proj_mod",
    "two_hash",
    "hashed_actor",
    "hashed_dist",
    "drop_id",
)
# Uniform base weight, doubled for the four sufficiency-extreme families.
TEMPLATE_WEIGHTS = {
    name: (2.0 if name in ("value_plus", "dist_coarse", "dir_subset", "dir_coarse") else 1.0)
    for name in TEMPLATE_NAMES
}

_DIR_NAMES = ("dx1", "dy1", "dx2", "dy2")
_DIR_BY_NAME = dict(zip(_DIR_NAMES, DIR_COLS))
_DIST_NAMES = ("d_at", "d_bg")
_DIST_BY_NAME = dict(zip(_DIST_NAMES, (F_DAT, F_DBG)))

_HASH_MULT = np.uint64(1000003)
_HASH_OFFSET = np.uint64(17)
_HASH_SHIFT = np.int64(64)


@dataclass(frozen=True)
class RepresentationSpec:
    """Deterministic descriptor of a goal encoder.

    ``params`` is a canonical tuple of (key, value) pairs with tuple-valued
    sequences, so specs are hashable and JSON round-trips are exact.
    """

    id: str
    kind: str  # "baseline" | "template"
    name: str
    params: tuple = ()
    seed: int | None = None

    @property
    def p(self) -> dict:
        return dict(self.params)


def _freeze(value):
    if isinstance(value, (list, tuple)):
        return tuple(_freeze(v) for v in value)
    return value


def _make_params(d: dict) -> tuple:
    return tuple((k, _freeze(v)) for k, v in d.items())


def _fmt_value(v) -> str:
    if isinstance(v, tuple):
        return "+".join(_fmt_value(x) for x in v)
    if isinstance(v, bool):
        return "1" if v else "0"
    return str(v)


def _spec_id(name: str, index: int, params: dict) -> str:
    body = " ".join(f"{k}={_fmt_value(_freeze(v))}" for k, v in params.items())
    return f"{index:04d}-{name}({body})"


def baseline(kind: str) -> RepresentationSpec:
    if kind not in BASELINE_NAMES:
        raise ValueError(f"unknown baseline {kind!r}")
    return RepresentationSpec(id=kind, kind="baseline", name=kind)


def baselines() -> list[RepresentationSpec]:
    return [baseline(k) for k in BASELINE_NAMES]


def spec_to_json(spec: RepresentationSpec) -> dict:
    def thaw(v):
        return [thaw(x) for x in v] if isinstance(v, tuple) else v

    return {
        "id": spec.id,
        "template": spec.name,
        "params": {k: thaw(v) for k, v in spec.params},
        "seed": spec.seed,
    }


def spec_from_json(obj: dict) -> RepresentationSpec:
    name = obj["template"]
    kind = "baseline" if name in BASELINE_NAMES else "template"
    return RepresentationSpec(
        id=obj["id"],
        kind=kind,
        name=name,
        params=_make_params(obj.get("params", {})),
        seed=obj.get("seed"),
    )


# --- sampling ---------------------------------------------------------------


def _nonempty_subset(gen: np.random.Generator, names: Iterable[str]) -> list[str]:
    names = list(names)
    while True:
        mask = gen.random(len(names)) < 0.5
        if mask.any():
            return [n for n, m in zip(names, mask) if m]


def _sample_params(name: str, gen: np.random.Generator) -> dict:
    if name == "value_plus":
        return {
            "include_target": bool(gen.integers(2)),
            "value_tr": VALUE_TRANSFORMS[gen.integers(len(VALUE_TRANSFORMS))],
        }
    if name == "dist_coarse":
        return {
            "include_target": bool(gen.integers(2)),
            "tr_at": DISTANCE_TRANSFORMS[gen.integers(len(DISTANCE_TRANSFORMS))],
            "tr_bg": DISTANCE_TRANSFORMS[gen.integers(len(DISTANCE_TRANSFORMS))],
        }
    if name == "dir_subset":
        # skew toward large sign subsets: this family is meant to populate the
        # action-sufficient / value-insufficient corner, and 1-2 direction
        # subsets control almost nothing
        size = int(gen.choice(4, p=np.array([1.0, 2.0, 4.0, 8.0]) / 15.0)) + 1
        picked = sorted(gen.choice(4, size=size, replace=False))
        return {
            "include_target": bool(gen.integers(2)),
            "dirs": [_DIR_NAMES[i] for i in picked],
        }
    if name == "dir_coarse":
        return {
            "include_target": bool(gen.integers(2)),
            "trs": [
                DIRECTIONAL_TRANSFORMS[gen.integers(len(DIRECTIONAL_TRANSFORMS))]
                for _ in _DIR_NAMES
            ],
        }
    if name == "mixed_dir_dist":
        dirs = _nonempty_subset(gen, _DIR_NAMES)
        dists = _nonempty_subset(gen, _DIST_NAMES)
        return {
            "include_target": bool(gen.integers(2)),
            "dirs": dirs,
            "dir_trs": [
                DIRECTIONAL_TRANSFORMS[gen.integers(len(DIRECTIONAL_TRANSFORMS))] for _ in dirs
            ],
            "dists": dists,
            "dist_trs": [
                DISTANCE_TRANSFORMS[gen.integers(len(DISTANCE_TRANSFORMS))] for _ in dists
            ],
        }
    if name == "phase_split":
        while True:
            free = [n for n in _DIR_NAMES if gen.random() < 0.5]
            hold = [n for n in _DIR_NAMES if gen.random() < 0.5]
            if free or hold:
                break
        return {
            "include_target": bool(gen.integers(2)),
            "free_dirs": free,
            "free_trs": [
                DIRECTIONAL_TRANSFORMS[gen.integers(len(DIRECTIONAL_TRANSFORMS))] for _ in free
            ],
            "hold_dirs": hold,
            "hold_trs": [
                DIRECTIONAL_TRANSFORMS[gen.integers(len(DIRECTIONAL_TRANSFORMS))] for _ in hold
            ],
        }
    if name == "proj_mod":
        n_proj = int(gen.integers(1, 3))
        coeffs = []
        while len(coeffs) < n_proj:
            row = gen.integers(-2, 3, size=4)
            if np.any(row != 0):
                coeffs.append([int(c) for c in row])
        return {
            "include_target": bool(gen.integers(2)),
            "mod": int(gen.integers(2, 6)),
            "coeffs": coeffs,
        }
    if name == "two_hash":
        return {
            "include_target": bool(gen.integers(2)),
            "mod1": int(gen.integers(3, 25)),
            "mod2": int(gen.integers(3, 25)),
        }
    if name == "hashed_actor":
        return {
            "include_target": bool(gen.integers(2)),
            "mod": int(gen.integers(3, 25)),
        }
    if name == "hashed_dist":
        return {
            "include_target": bool(gen.integers(2)),
            "mod": int(gen.integers(3, 25)),
        }
    if name == "drop_id":
        return {}
    raise ValueError(f"unknown template {name!r}")


def sample_library(count: int, seed: int) -> list[RepresentationSpec]:
    """``count`` template specs, reproducible from ``seed`` alone.

    Spec ``i`` is drawn from its own counter-based substream, so the library
    is independent of sampling order and any later library extension keeps
    earlier specs unchanged.
    """
    if count < 1:
        raise ValueError(f"library size must be >= 1, got {count}")
    weights = np.array([TEMPLATE_WEIGHTS[n] for n in TEMPLATE_NAMES], dtype=np.float64)
    weights /= weights.sum()
    specs = []
    for i in range(count):
        gen = rng.substream(seed, rng.STREAM_LIBRARY, i)
        name = TEMPLATE_NAMES[int(gen.choice(len(TEMPLATE_NAMES), p=weights))]
        params = _sample_params(name, gen)
        specs.append(
            RepresentationSpec(
                id=_spec_id(name, i, params),
                kind="template",
                name=name,
                params=_make_params(params),
                seed=seed,
            )
        )
    return specs


# --- encoding ---------------------------------------------------------------


def _poly_hash(cols: list[np.ndarray], mod: int) -> np.ndarray:
    acc = np.full(cols[0].shape, _HASH_OFFSET, dtype=np.uint64)
    for c in cols:
        acc = acc * _HASH_MULT + (c.astype(np.int64) + _HASH_SHIFT).astype(np.uint64)
    return (acc % np.uint64(mod)).astype(np.int64)


def encode_matrix(spec: RepresentationSpec, feats: np.ndarray) -> np.ndarray:
    """(P, K) int64 encodings of a feature matrix (see `feature_matrix`)."""
    f = feats
    p = spec.p
    cols: list[np.ndarray] = []

    def dir_col(dname: str, tr: str = "raw") -> np.ndarray:
        return apply_transform(tr, f[:, _DIR_BY_NAME[dname]].astype(np.int64))

    if spec.name == "full":
        cols = [f[:, c].astype(np.int64) for c in (F_H, F_T, *DIR_COLS)]
    elif spec.name == "signs":
        cols = [f[:, F_H].astype(np.int64), f[:, F_T].astype(np.int64)]
        cols += [dir_col(d, "sign") for d in _DIR_NAMES]
    elif spec.name == "value_only":
        cols = [f[:, F_V].astype(np.int64)]
    elif spec.name == "distances":
        cols = [f[:, c].astype(np.int64) for c in (F_H, F_DAT, F_DBG)]
    elif spec.name == "value_plus":
        cols = [f[:, F_H].astype(np.int64)]
        if p["include_target"]:
            cols.append(f[:, F_T].astype(np.int64))
        cols.append(apply_transform(p["value_tr"], f[:, F_V].astype(np.int64)))
    elif spec.name == "dist_coarse":
        cols = [f[:, F_H].astype(np.int64)]
        if p["include_target"]:
            cols.append(f[:, F_T].astype(np.int64))
        cols.append(apply_transform(p["tr_at"], f[:, F_DAT].astype(np.int64)))
        cols.append(apply_transform(p["tr_bg"], f[:, F_DBG].astype(np.int64)))
    elif spec.name == "dir_subset":
        cols = [f[:, F_H].astype(np.int64)]
        if p["include_target"]:
            cols.append(f[:, F_T].astype(np.int64))
        cols += [dir_col(d, "sign") for d in p["dirs"]]
    elif spec.name == "dir_coarse":
        cols = [f[:, F_H].astype(np.int64)]
        if p["include_target"]:
            cols.append(f[:, F_T].astype(np.int64))
        cols += [dir_col(d, tr) for d, tr in zip(_DIR_NAMES, p["trs"])]
    elif spec.name == "mixed_dir_dist":
        cols = [f[:, F_H].astype(np.int64)]
        if p["include_target"]:
            cols.append(f[:, F_T].astype(np.int64))
        cols += [dir_col(d, tr) for d, tr in zip(p["dirs"], p["dir_trs"])]
        cols += [
            apply_transform(tr, f[:, _DIST_BY_NAME[d]].astype(np.int64))
            for d, tr in zip(p["dists"], p["dist_trs"])
        ]
    elif spec.name == "phase_split":
        holding = (f[:, F_H] > 0).astype(np.int64)
        cols = [holding]
        if p["include_target"]:
            cols.append(f[:, F_T].astype(np.int64))
        # inactive-phase columns are zeroed; the phase bit keeps them apart
        cols += [
            np.where(holding == 0, dir_col(d, tr), 0)
            for d, tr in zip(p["free_dirs"], p["free_trs"])
        ]
        cols += [
            np.where(holding == 1, dir_col(d, tr), 0)
            for d, tr in zip(p["hold_dirs"], p["hold_trs"])
        ]
    elif spec.name == "proj_mod":
        cols = [f[:, F_H].astype(np.int64)]
        if p["include_target"]:
            cols.append(f[:, F_T].astype(np.int64))
        d = f[:, list(DIR_COLS)].astype(np.int64)
        for row in p["coeffs"]:
            proj = d @ np.asarray(row, dtype=np.int64)
            cols.append(np.mod(proj, p["mod"]))
    elif spec.name == "two_hash":
        cols = [f[:, F_H].astype(np.int64)]
        if p["include_target"]:
            cols.append(f[:, F_T].astype(np.int64))
        cols.append(_poly_hash([dir_col("dx1"), dir_col("dy1")], p["mod1"]))
        cols.append(_poly_hash([dir_col("dx2"), dir_col("dy2")], p["mod2"]))
    elif spec.name == "hashed_actor":
        cols = [f[:, F_H].astype(np.int64)]
        if p["include_target"]:
            cols.append(f[:, F_T].astype(np.int64))
        cols.append(_poly_hash([dir_col(d) for d in _DIR_NAMES], p["mod"]))
    elif spec.name == "hashed_dist":
        cols = [f[:, F_H].astype(np.int64)]
        if p["include_target"]:
            cols.append(f[:, F_T].astype(np.int64))
        cols.append(
            _poly_hash(
                [f[:, F_DAT].astype(np.int64), f[:, F_DBG].astype(np.int64)], p["mod"]
            )
        )
    elif spec.name == "drop_id":
        cols = [f[:, F_H].astype(np.int64)]
        cols += [dir_col(d) for d in _DIR_NAMES]
    else:
        raise ValueError(f"unknown representation {spec.name!r}")
    return np.stack(cols, axis=1)


def encode(
    spec: RepresentationSpec,
    s: CubeState,
    g: Goal,
    world: CubeWorld,
    oracle: OracleTables,
) -> tuple[int, ...]:
    """Canonical integer tuple z = phi(s, g) for one pair."""
    si = world.state_index[s]
    gi = world.goal_index(g)
    feats = feature_matrix(world, oracle, np.array([si]), np.array([gi]))
    return tuple(int(x) for x in encode_matrix(spec, feats)[0])
