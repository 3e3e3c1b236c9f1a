"""Run configuration and the cached computation pipeline.

The expensive steps (corona enumeration and adjacency collection) are
cached as JSON under a key built from the rule digest and the scan limits.
Cached results are re-certified on load (the closure checks are cheap), so
a stale or hand-edited cache can change runtime but never a result.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

from . import __version__
from .apcomplex import POLYGONAL, SIMPLICIAL, Adjacency, collect_adjacency, configs_closed
from .corona import Enumeration, IncompleteEnumeration, _closure, _make_classes, enumerate_collared
from .perron import collared_matrix, perron_data
from .substitution import DEFAULT_MAX_LEVEL, SubstitutionRule, pinwheel_rule

log = logging.getLogger(__name__)

CACHE_ENV = "PINWHEEL_CACHE"


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "pinwheel"


@dataclass
class RunConfig:
    max_level: int = DEFAULT_MAX_LEVEL
    scan_level_start: int = 3
    cache_dir: Path | None = field(default_factory=default_cache_dir)
    use_cache: bool = True

    def __post_init__(self):
        if self.max_level < 1 or self.scan_level_start < 1:
            raise ValueError("level limits must be positive")
        if self.cache_dir is not None:
            self.cache_dir = Path(self.cache_dir)

    def cache_path(self, rule: SubstitutionRule, what: str) -> Path | None:
        if not self.use_cache or self.cache_dir is None:
            return None
        name = f"{what}-{rule.digest()[:16]}-s{self.scan_level_start}-m{self.max_level}.json"
        return self.cache_dir / name


def _tuplify(x):
    return tuple(_tuplify(y) for y in x) if isinstance(x, list) else x


def _load(path: Path | None):
    if path is None or not path.exists():
        return None
    try:
        return json.loads(path.read_text())
    except (OSError, ValueError) as exc:
        log.warning("ignoring unreadable cache %s: %s", path, exc)
        return None


def _store(path: Path | None, data) -> None:
    if path is None:
        return
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(data, separators=(",", ":")))
        tmp.replace(path)
    except OSError as exc:
        log.warning("could not write cache %s: %s", path, exc)


def enumeration_from_json(d: dict, rule: SubstitutionRule) -> Enumeration:
    sigs = [_tuplify(s) for s in d["signatures"]]
    classes, sig_ids = _make_classes(sigs)
    table, missing = _closure(classes, rule)
    if missing:
        raise IncompleteEnumeration("cached class set is not closed under substitution")
    e = Enumeration(classes, d["levels"], {int(k): v for k, v in d["counts"].items()}, True, True, table)
    e._sig_ids = sig_ids
    return e


def enumeration_to_json(e: Enumeration) -> dict:
    order = sorted(e.by_signature().items(), key=lambda kv: kv[1])
    return {"signatures": [s for s, _ in order], "levels": e.levels, "counts": e.counts}


class Pipeline:
    """Lazily computed, cached results for one rule and configuration."""

    def __init__(self, rule: SubstitutionRule | None = None, config: RunConfig | None = None):
        self.rule = rule or pinwheel_rule()
        self.config = config or RunConfig()

    @cached_property
    def enumeration(self) -> Enumeration:
        path = self.config.cache_path(self.rule, "coronas")
        data = _load(path)
        if data is not None:
            try:
                return enumeration_from_json(data, self.rule)
            except (IncompleteEnumeration, KeyError, TypeError, ValueError) as exc:
                log.warning("cache %s rejected: %s", path, exc)
        e = enumerate_collared(self.rule, self.config.scan_level_start, self.config.max_level)
        _store(path, enumeration_to_json(e))
        return e

    @cached_property
    def matrix(self) -> list[list[int]]:
        e = self.enumeration
        return collared_matrix(len(e), e.children)

    @cached_property
    def perron(self):
        return perron_data(self.matrix)

    @cached_property
    def adjacency(self) -> Adjacency:
        e = self.enumeration
        path = self.config.cache_path(self.rule, "adjacency")
        data = _load(path)
        if data is not None:
            configs = {_tuplify(c) for c in data["configs"]}
            if not configs_closed(configs, e, self.rule):
                return Adjacency(sorted(configs), data["levels"], True, True)
            log.warning("cache %s rejected: configurations not closed", path)
        adj = collect_adjacency(e, self.rule, max_level=self.config.max_level)
        _store(path, {"configs": adj.configs, "levels": adj.levels})
        return adj

    def complex(self, level: int = 0, structure: str = "simplicial", orientation: str = "plane"):
        from .apcomplex import build_complex

        key = (level, structure, orientation)
        cache = self.__dict__.setdefault("_complexes", {})
        if key not in cache:
            s = {"simplicial": SIMPLICIAL, "polygonal": POLYGONAL}[structure]
            cache[key] = build_complex(self.enumeration, self.adjacency, self.rule, level, s, orientation)
        return cache[key]

    def provenance(self) -> dict:
        return {"rule": self.rule.name, "rule_digest": self.rule.digest(), "version": __version__}
