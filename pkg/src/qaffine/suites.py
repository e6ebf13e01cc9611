"""Named verification suites: configuration, work units and report merging.

A suite is split into units (one per weight or per space), each unit is run
in a fresh process-safe way and returns a plain report dict; the dicts are
merged with the unit tag appended to every relation id.  Output depends on
the configuration only, never on ``jobs`` or the cache directory.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from .sl2mod import AffineWeightA1, ModuleFamily

__all__ = ["SuiteConfig", "SUITES", "ConfigError", "run_suite", "report_to_tsv", "CACHE_ENV"]

CACHE_ENV = "QAFFINE_CACHE_DIR"
LEVEL2 = ("2L0", "L0+L1", "2L1")


class ConfigError(ValueError):
    """Bad suite name, selector or flag combination."""


@dataclass
class SuiteConfig:
    suite: str
    depth: int | None = None
    window: int | None = None
    order: int | None = None
    spaces: list[int] | None = None
    lambdas: list[str] | None = None
    sample: int | None = None
    seed: int = 0
    jobs: int = 1
    cache_dir: str | None = None
    timing: bool = False

    def recorded(self, spec: "SuiteSpec") -> dict:
        """The fields that determine the report (no jobs, cache or timing)."""
        d = {"suite": self.suite, "seed": self.seed, "sample": self.sample}
        for k in spec.uses:
            d[k] = getattr(self, k)
        return d


@dataclass
class SuiteSpec:
    name: str
    run: Callable[[SuiteConfig, object], object]
    defaults: dict
    selector: str | None = None   # "lambdas", "spaces" or None
    uses: tuple = ("depth",)
    description: str = ""
    units_default: tuple = field(default=())


def _family(cfg: SuiteConfig, level: int, depth: int) -> ModuleFamily:
    return ModuleFamily(level, depth, cache_dir=cfg.cache_dir)


def _lam(text: str) -> AffineWeightA1:
    try:
        return AffineWeightA1.parse(text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _sample(cfg: SuiteConfig):
    return None if cfg.sample is None else (cfg.sample, cfg.seed)


# -- unit runners --------------------------------------------------------------------

def _run_sl2_drinfeld(cfg, lam):
    from .sl2mod import verify_drinfeld
    lam = _lam(lam)
    return [verify_drinfeld(lam, cfg.depth, cfg.window, _family(cfg, lam.level, cfg.depth),
                            max_states=_sample(cfg))]


def _run_s_reflection(cfg, lam):
    from .sl2mod import verify_reflection
    lam = _lam(lam)
    return [verify_reflection(lam, cfg.depth, _family(cfg, lam.level, cfg.depth), max_states=_sample(cfg))]


def _run_dhat(cfg, lam):
    from .sl2mod import verify_dhat
    lam = _lam(lam)
    return [verify_dhat(lam, cfg.depth, cfg.window, _family(cfg, lam.level, cfg.depth),
                        max_states=_sample(cfg))]


def _run_normal_ordering(cfg, _unit):
    from .fockvo import verify_normal_ordering
    return [verify_normal_ordering(cfg.order)]


def _run_omega(cfg, _unit):
    from .fockvo import verify_modewise
    return [verify_modewise(cfg.order, window=cfg.window)]


def _intertwiner_host(cfg, lam):
    from .intertwine import Intertwiners
    return Intertwiners(_family(cfg, lam.level, cfg.depth))


def _run_intertwiner(kind):
    def run(cfg, lam):
        from .intertwine import verify_exchange, verify_intertwining, verify_drinfeld_commutation, verify_qd_conjugation
        lam = _lam(lam)
        it = _intertwiner_host(cfg, lam)
        l, N, W, smp = lam.level, cfg.depth, cfg.window, _sample(cfg)
        reps = [verify_intertwining(kind, l, lam, N, W, inter=it, max_states=smp),
                verify_drinfeld_commutation(kind, l, lam, N, W, kmax=W, inter=it, max_states=smp),
                verify_qd_conjugation(kind, l, lam, N, W, inter=it, max_states=smp)]
        if kind == "I":
            reps.append(verify_exchange(l, lam, N, W, inter=it, max_states=smp))
        return reps
    return run


def _sp4_action(cfg, j):
    from .spfour import BigSpace, Sp4Action
    if j not in (0, 1, 2):
        raise ConfigError("space must be 0, 1 or 2")
    return Sp4Action(BigSpace(j, cfg.depth, _family(cfg, 2, cfg.depth)))


def _run_y_ops(cfg, j):
    from .spfour import verify_y_ops
    return [verify_y_ops(j, cfg.depth, cfg.window, kmax=cfg.window, action=_sp4_action(cfg, j),
                         max_states=_sample(cfg))]


def _run_sp4_relations(cfg, j):
    from .spfour import verify_sp4_relations
    return [verify_sp4_relations(j, cfg.depth, cfg.window, kmax=cfg.window, action=_sp4_action(cfg, j),
                                 max_states=_sample(cfg))]


def _run_sp4_serre(cfg, j):
    from .spfour import verify_sp4_serre
    return [verify_sp4_serre(j, cfg.depth, window_cubic=cfg.window, window_quartic=max(cfg.window - 1, 0),
                             action=_sp4_action(cfg, j), max_states=_sample(cfg))]


def _run_highest_weight(cfg, j):
    from .spfour import verify_highest_weight
    return [verify_highest_weight(j, cfg.depth, action=_sp4_action(cfg, j))]


def _run_nested_commutator(cfg, lam):
    from .intertwine import verify_nested_commutator
    lam = _lam(lam)
    if lam.level != 2:
        raise ConfigError("the nested commutator identity is stated at level 2")
    return [verify_nested_commutator(lam, cfg.depth, cfg.window, inter=_intertwiner_host(cfg, lam))]


def _run_linking(cfg, _unit):
    from .spfour import verify_linking
    return [verify_linking(cfg.depth, pmax=cfg.window, fam=_family(cfg, 2, cfg.depth))]


SUITES: dict[str, SuiteSpec] = {s.name: s for s in [
    SuiteSpec("sl2-drinfeld", _run_sl2_drinfeld, {"depth": 6, "window": 3}, "lambdas", ("depth", "window"),
              "Drinfeld relations of U_q(sl2-hat) in modes and weight multiplicities", LEVEL2),
    SuiteSpec("s-reflection", _run_s_reflection, {"depth": 5}, "lambdas", ("depth",),
              "conjugation by S_0, S_1 and the q-exponential inverse", LEVEL2),
    SuiteSpec("dhat", _run_dhat, {"depth": 5, "window": 2}, "lambdas", ("depth", "window"),
              "D-hat: both constructions, inverse, action on K, a(k), x(k)", LEVEL2),
    SuiteSpec("normal-ordering", _run_normal_ordering, {"order": 12}, None, ("order",),
              "prefactors of vertex-operator products as series"),
    SuiteSpec("omega", _run_omega, {"order": 12, "window": 3}, None, ("order", "window"),
              "vertex-operator products checked mode by mode on Fock spaces"),
    SuiteSpec("intertwiner-I", _run_intertwiner("I"), {"depth": 5, "window": 1}, "lambdas", ("depth", "window"),
              "type-I intertwiner components", LEVEL2),
    SuiteSpec("intertwiner-II", _run_intertwiner("II"), {"depth": 5, "window": 1}, "lambdas",
              ("depth", "window"), "type-II intertwiner components", LEVEL2),
    SuiteSpec("y-ops", _run_y_ops, {"depth": 3, "window": 2}, "spaces", ("depth", "window"),
              "brackets of a, b, b(0), q^d with Y modes", (0, 1, 2)),
    SuiteSpec("sp4-relations", _run_sp4_relations, {"depth": 4, "window": 3}, "spaces", ("depth", "window"),
              "Drinfeld relations of U_q(sp4-hat) except Serre", (0, 1, 2)),
    SuiteSpec("sp4-serre", _run_sp4_serre, {"depth": 4, "window": 2}, "spaces", ("depth", "window"),
              "Serre relations (cubic window w, quartic window w-1)", (0, 1, 2)),
    SuiteSpec("highest-weight", _run_highest_weight, {"depth": 4}, "spaces", ("depth",),
              "designated vector is highest with weight Lambda_j", (0, 1, 2)),
    SuiteSpec("nested-commutator", _run_nested_commutator, {"depth": 4, "window": 3}, "lambdas", ("depth", "window"),
              "nested q-commutator of Phi_0 with x^- on highest vectors", LEVEL2),
    SuiteSpec("linking", _run_linking, {"depth": 4, "window": 1}, None, ("depth", "window"),
              "vacuum linking equations (window = charge range)"),
]}


def _units(cfg: SuiteConfig, spec: SuiteSpec) -> list:
    if spec.selector == "lambdas":
        if cfg.spaces:
            raise ConfigError(f"suite {spec.name} takes --lambda, not --space")
        labels = cfg.lambdas or list(spec.units_default)
        return sorted({_lam(x).label for x in labels}, key=lambda t: (_lam(t).level, _lam(t).m1))
    if spec.selector == "spaces":
        if cfg.lambdas:
            raise ConfigError(f"suite {spec.name} takes --space, not --lambda")
        js = sorted(set(cfg.spaces if cfg.spaces is not None else spec.units_default))
        if any(j not in (0, 1, 2) for j in js):
            raise ConfigError("space must be 0, 1 or 2")
        return js
    if cfg.lambdas or cfg.spaces:
        raise ConfigError(f"suite {spec.name} takes no --lambda/--space selector")
    return [None]


def _unit_tag(spec: SuiteSpec, unit) -> str:
    if spec.selector == "lambdas":
        return f" [{unit}]"
    if spec.selector == "spaces":
        return f" [V({unit})]"
    return ""


def _run_unit(args) -> list[dict]:
    name, cfg, unit = args
    spec = SUITES[name]
    out = []
    for rep in spec.run(cfg, unit):
        for entry in rep.as_dict(cfg.timing)["relations"]:
            entry["id"] += _unit_tag(spec, unit)
            out.append(entry)
    return out


def resolve(cfg: SuiteConfig) -> tuple[SuiteSpec, list]:
    spec = SUITES.get(cfg.suite)
    if spec is None:
        raise ConfigError(f"unknown suite {cfg.suite!r}; choose from {', '.join(SUITES)}")
    for k, v in spec.defaults.items():
        if getattr(cfg, k) is None:
            setattr(cfg, k, v)
    for k in ("depth", "window", "order"):
        v = getattr(cfg, k)
        if v is not None and v < 0:
            raise ConfigError(f"--{k} must be non-negative")
    if cfg.jobs < 1:
        raise ConfigError("--jobs must be at least 1")
    if cfg.sample is not None and cfg.sample < 1:
        raise ConfigError("--sample must be positive")
    units = _units(cfg, spec)
    return spec, units


def run_suite(cfg: SuiteConfig) -> dict:
    """Run a suite and return the merged report as a plain dict."""
    spec, units = resolve(cfg)
    if cfg.cache_dir:
        os.makedirs(cfg.cache_dir, exist_ok=True)
    tasks = [(spec.name, cfg, u) for u in units]
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.jobs, len(tasks))) as pool:
            parts = list(pool.map(_run_unit, tasks))
    else:
        parts = [_run_unit(t) for t in tasks]
    relations = sorted((e for p in parts for e in p), key=lambda e: e["id"])
    ids = [e["id"] for e in relations]
    if len(ids) != len(set(ids)):
        raise RuntimeError("duplicate relation ids in merged report")
    config = cfg.recorded(spec)
    config["units"] = [str(u) for u in units] if spec.selector else []
    return {
        "suite": spec.name,
        "config": config,
        "pass": bool(relations) and all(e["pass"] for e in relations),
        "relations": relations,
    }


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=1, sort_keys=True) + "\n"


def report_to_tsv(report: dict) -> str:
    cols = ["id", "pass", "checked", "nontrivial", "skipped", "failed"]
    timing = any("wall_time_s" in e for e in report["relations"])
    if timing:
        cols.append("wall_time_s")
    lines = ["\t".join(cols)]
    for e in report["relations"]:
        lines.append("\t".join("PASS" if c == "pass" and e[c] else "FAIL" if c == "pass" else str(e[c])
                               for c in cols))
    return "\n".join(lines) + "\n"
