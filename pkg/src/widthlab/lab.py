"""Run configuration, width assignment, the index-bound counterexample check and the full pipeline.

The min-max widths themselves are not computable here. On a near-round
ellipsoid with a1 < a2 < a3 the pipeline takes as given that widths 1-3 are
the masses of the principal geodesics and that widths 4-8 are the masses of
five of W4..W9 in increasing order, and checks the arithmetic consequences.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import fixtures, io
from .cone import (build_cone, cone_density, cone_mass_growth, first_variation,
                   random_bump_field)
from .curves import Varifold1, great_circle
from .network import (classify_junction, integer_density_filter, is_integer_density,
                      network_is_stationary, stationarity_residual)
from .rng import philox
from .spectral import candidate_table, index_nullity, principal_geodesic
from .surface import EllipsoidParams
from .sweepouts import (LOW_BUDGET, concentration_profile, crofton_mass, evaluate_cycle,
                        line_pair_distance, no_concentration_bound, polynomial_family,
                        sup_mass_scan)

log = logging.getLogger(__name__)

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG = 0, 2, 3

DEFAULT_TOLERANCES = {
    "scan_low": 1e-2,  # |sup mass - 2 pi| for k = 1..3 on the round sphere
    "scan_high": 5e-2,  # |sup mass - 4 pi| for k = 4..8
    "line_pair": 1e-2,  # projective distance of some F4..F8 argmax to a product of linear forms
    "tie": 1e-9,  # masses closer than this make a width assignment ambiguous
    "cone_density": 3e-2,
    "cone_growth": 5e-2,
    "first_variation": 1e-3,
    "junction": 1e-6,
}

STAGES = ("scan", "index", "candidates", "widths", "counterexample", "cone", "network")
COMMAND_STAGES = {
    "scan": ("scan",),
    "index": ("index",),
    "widths": ("candidates", "widths", "counterexample"),
    "cone-check": ("cone",),
    "network-check": ("network",),
    "all": ("scan", "index", "candidates", "widths", "counterexample"),
}
DEPENDS = {"widths": ("candidates",), "counterexample": ("widths",)}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    surface: EllipsoidParams = EllipsoidParams(0.95, 1.0, 1.05)
    level: int = 6
    budget: int = 5000
    seed: int = 0
    families: tuple = (1, 2, 3, 4, 5, 6, 7, 8)
    crofton_samples: int = 10_000
    out: Path = Path("widthlab-out")
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def __post_init__(self):
        for name in ("level", "budget", "crofton_samples"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if not 4 <= self.level <= 8:
            raise ConfigError("level must be in 4..8")
        if any(not 1 <= k <= 8 for k in self.families):
            raise ConfigError("families must lie in 1..8")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ConfigError(f"unknown tolerance(s): {', '.join(sorted(unknown))}")
        if any(not v > 0 for v in self.tolerances.values()):
            raise ConfigError("tolerances must be positive")
        object.__setattr__(self, "out", Path(self.out))
        object.__setattr__(self, "families", tuple(int(k) for k in self.families))

    def as_dict(self) -> dict:
        d = asdict(self)
        d["surface"] = [self.surface.a1, self.surface.a2, self.surface.a3]
        d["out"] = str(self.out)
        d["families"] = list(self.families)
        return d

    def with_overrides(self, **kw) -> "RunConfig":
        tol = dict(self.tolerances)
        tol.update(kw.pop("tolerances", None) or {})
        kw = {k: v for k, v in kw.items() if v is not None}
        try:
            return replace(self, tolerances=tol, **kw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc


def parse_families(text: str) -> tuple:
    out = []
    for part in text.replace(" ", "").split(","):
        if "-" in part:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return tuple(out)


def parse_tolerance(item: str) -> tuple[str, float]:
    if "=" not in item:
        raise ConfigError(f"tolerance override must be NAME=VALUE, got {item!r}")
    name, value = item.split("=", 1)
    try:
        return name.strip(), float(value)
    except ValueError as exc:
        raise ConfigError(f"bad tolerance value in {item!r}") from exc


def load_config(path, base: RunConfig | None = None) -> RunConfig:
    """Read key = value lines; '#' starts a comment. Keys mirror the CLI flags."""
    fields: dict = {}
    tol: dict = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if key == "surface":
                fields["surface"] = EllipsoidParams.parse(value)
            elif key in ("level", "budget", "seed", "crofton_samples"):
                fields[key] = int(value)
            elif key == "families":
                fields["families"] = parse_families(value)
            elif key == "out":
                fields["out"] = Path(value)
            elif key.startswith("tol."):
                tol[key[4:]] = float(value)
            else:
                raise ConfigError(f"{path}:{n}: unknown key {key!r}")
        except ValueError as exc:
            raise ConfigError(f"{path}:{n}: {exc}") from exc
    return (base or RunConfig()).with_overrides(tolerances=tol, **fields)


# ------------------------------------------------------------ width assignment

SCENARIO_NOTE = "widths 4-8 are five of W4..W9 in increasing mass order"


def width_assignment(E: EllipsoidParams, table=None, tie: float = 1e-9) -> dict:
    """Assign widths 1-8 to candidate masses.

    On a round sphere widths 1-3 are 2 pi and 4-8 are 4 pi. Otherwise widths
    1-3 are W1..W3 and each choice of the omitted candidate among W4..W9
    gives one scenario for widths 4-8. Masses within ``tie`` of each other
    make the order ambiguous, which is reported instead of resolved.
    """
    if E.is_sphere:
        r2 = 1.0 / E.a1
        widths = [2 * np.pi * math.sqrt(r2)] * 3 + [4 * np.pi * math.sqrt(r2)] * 5
        return {"surface": str(E), "round": True,
                "widths": [{"k": k + 1, "mass": w, "source": "assumed-theorem"}
                           for k, w in enumerate(widths)],
                "scenarios": [], "ambiguous": False, "strictly_increasing": False}
    if not (E.near_round and E.strictly_ordered):
        raise ValueError(f"{E} is not a near-round ellipsoid with a1 < a2 < a3")
    table = candidate_table(E) if table is None else table
    rows = {r.label: r for r in table.rows}
    low = [rows[f"W{i}"] for i in (1, 2, 3)]
    high = sorted((rows[f"W{i}"] for i in range(4, 10)), key=lambda r: (r.mass, r.label))
    ambiguous = any(abs(a.mass - b.mass) <= tie for a, b in zip(high, high[1:]))
    ambiguous |= any(abs(a.mass - b.mass) <= tie for a, b in zip(low, low[1:]))
    scenarios = []
    for omit in high:
        used = [r for r in high if r is not omit]
        seq = low + used
        masses = [r.mass for r in seq]
        scenarios.append({
            "omitted": omit.label,
            "assignment": [{"k": k + 1, "label": r.label, "mass": r.mass,
                            "index": r.index, "nullity": r.nullity}
                           for k, r in enumerate(seq)],
            "strictly_increasing": all(b - a > tie for a, b in zip(masses, masses[1:])),
        })
    width4 = sorted({s["assignment"][3]["label"] for s in scenarios})
    return {
        "surface": str(E), "round": False,
        "widths": [{"k": k + 1, "label": r.label, "mass": r.mass, "source": "assumed-theorem"}
                   for k, r in enumerate(low)],
        "high_order": [r.label for r in high],
        "width4_candidates": width4,
        "w6_w7_order": table.flags["W6_vs_W7"],
        "scenarios": scenarios,
        "ambiguous": bool(ambiguous),
        "strictly_increasing": all(s["strictly_increasing"] for s in scenarios),
        "note": SCENARIO_NOTE,
    }


def counterexample_report(E: EllipsoidParams, assignment=None) -> dict:
    """In every scenario, widths k realized by a candidate with index + nullity < k.

    The bound index + nullity >= k for the varifold realizing width k fails
    on E as soon as every scenario contains such a k. The three groups of
    scenarios are: width 4 = W4 (W4 at k = 4 has 3 + 0 < 4); width 4 = W5
    with W6 before W7 (W6 at k = 5); width 4 = W5 with W7 before W6 (W6 at
    k = 6). Indices of sums of two geodesics are additive by assumption.
    """
    a = width_assignment(E) if assignment is None else assignment
    if a["round"]:
        raise ValueError("the counterexample check needs a1 < a2 < a3")
    out = []
    for s in a["scenarios"]:
        seq = s["assignment"]
        viol = [{"k": w["k"], "label": w["label"], "index": w["index"], "nullity": w["nullity"]}
                for w in seq if w["index"] + w["nullity"] < w["k"]]
        w4 = seq[3]["label"]
        pos = {w["label"]: w["k"] for w in seq}
        if w4 == "W4":
            group, key = "width4=W4", ("W4", 4)
        elif pos.get("W6", 99) < pos.get("W7", 99):
            group, key = "width4=W5, W6 before W7", ("W6", pos.get("W6"))
        else:
            group, key = "width4=W5, W7 before W6", ("W6", pos.get("W6"))
        witness = next((v for v in viol if (v["label"], v["k"]) == key), None)
        out.append({"omitted": s["omitted"], "group": group, "violations": viol,
                    "witness": witness, "violated": bool(viol)})
    every = all(s["violated"] for s in out)
    return {
        "surface": a["surface"],
        "bound": "index(V) + nullity(V) >= k for a varifold V realizing width k",
        "scenarios": out,
        "groups_seen": sorted({s["group"] for s in out}),
        "w6_w7_order": a["w6_w7_order"],
        "every_scenario_violated": every,
        "verdict": "bound violated" if every else "no violation in some scenario",
        "assumptions": ["width classification by candidate masses", "additive index for sums"],
    }


# ---------------------------------------------------------------------- stages


@dataclass
class StageOutcome:
    data: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    files: dict = field(default_factory=dict)  # relative path -> text


def _fmt(x) -> str:
    return "%.12g" % x


def stage_scan(cfg: RunConfig, ctx: dict) -> StageOutcome:
    E, tol = cfg.surface, cfg.tolerances
    res = StageOutcome()
    rows, pair = [], []
    if cfg.budget < LOW_BUDGET:
        res.warnings.append(f"LOW-CONFIDENCE: budget {cfg.budget} below {LOW_BUDGET}")
    for k in cfg.families:
        F = polynomial_family(k, E)
        scan = sup_mass_scan(F, cfg.budget, cfg.seed, cfg.level)
        row = {"k": k, "budget": cfg.budget, "seed": cfg.seed, "sup_mass": scan.sup_mass,
               "argmax": [float(x) for x in scan.argmax], "low_confidence": scan.low_confidence,
               "crofton_check": "n/a", "max_concentration_r01": float("nan")}
        if np.isfinite(scan.sup_mass):
            cyc = evaluate_cycle(F, scan.argmax, cfg.level)
            res.files[f"curves/F{k}_argmax.txt"] = io.dump_curves(cyc) if len(cyc) else "\n"
            if E.is_unit_sphere:
                cr = crofton_mass(cyc, cfg.crofton_samples, cfg.seed)
                ok = abs(cr.value - scan.sup_mass) <= max(0.01 * scan.sup_mass, 3 * cr.stderr)
                row["crofton_check"] = "pass" if ok else "fail"
                row["crofton_mass"] = cr.value
                if not ok:
                    res.failures.append(f"F{k}: Crofton mass {cr.value:.4f} vs {scan.sup_mass:.4f}")
            conc = float(concentration_profile(F, scan.argmax, [0.1], level=cfg.level, cycle=cyc)[0])
            row["max_concentration_r01"] = conc
            if conc > no_concentration_bound(0.1) + 1e-9:
                res.failures.append(f"F{k}: concentration {conc:.4f} above 4 pi sin(0.1)")
            if k >= 4:
                pair.append(line_pair_distance(F, scan.argmax))
                row["line_pair_distance"] = pair[-1]
        if E.is_sphere and not scan.low_confidence:
            target = (2 if k <= 3 else 4) * np.pi / math.sqrt(E.a1)
            t = tol["scan_low"] if k <= 3 else tol["scan_high"]
            row["target"] = target
            if not abs(scan.sup_mass - target) <= t:
                res.failures.append(f"F{k}: sup mass {scan.sup_mass:.6f} vs {target:.6f}")
        rows.append(row)
    if E.is_unit_sphere and pair and cfg.budget >= LOW_BUDGET and min(pair) > tol["line_pair"]:
        res.failures.append(f"no F4..F8 argmax near a product of linear forms ({min(pair):.3g})")
    res.data["scan"] = rows
    lines = ["k,budget,seed,sup_mass,argmax,crofton_check,max_concentration_r01"]
    for r in rows:
        arg = " ".join(_fmt(x) for x in r["argmax"])
        lines.append(f"{r['k']},{r['budget']},{r['seed']},{_fmt(r['sup_mass'])},{arg},"
                     f"{r['crofton_check']},{_fmt(r['max_concentration_r01'])}")
    res.files["scans.csv"] = "\n".join(lines) + "\n"
    return res


def stage_index(cfg: RunConfig, ctx: dict) -> StageOutcome:
    E = cfg.surface
    res = StageOutcome()
    rows = []
    if E.is_sphere:
        g = principal_geodesic(3, E)
        for n in (512, 1024):
            r = index_nullity(g, n)
            rows.append({"geodesic": "great circle", "covering": 1, "n": n, "index": r.index,
                         "nullity": r.nullity, "ambiguous": r.ambiguous, "expected": [1, 2]})
    elif E.near_round:
        for i in (1, 2, 3):
            for cov in (1, 2):
                g = principal_geodesic(i, E, covering=cov)
                res.files.setdefault(f"curves/gamma{i}.txt", io.dump_curves([g.curve]))
                for n in (512 * cov, 1024 * cov):
                    r = index_nullity(g, n)
                    rows.append({"geodesic": f"gamma{i}", "covering": cov, "n": n,
                                 "index": r.index, "nullity": r.nullity, "ambiguous": r.ambiguous,
                                 "expected": [i + 2 * (cov - 1), 0] if E.strictly_ordered else None})
    else:
        res.failures.append(f"{E} is not near-round")
    for r in rows:
        if r["ambiguous"]:
            res.failures.append(f"{r['geodesic']}^{r['covering']} n={r['n']}: eigenvalue in the ambiguous band")
        if r["expected"] is not None and [r["index"], r["nullity"]] != r["expected"]:
            res.failures.append(f"{r['geodesic']}^{r['covering']} n={r['n']}: "
                                f"({r['index']}, {r['nullity']}) != {tuple(r['expected'])}")
    res.data["index"] = rows
    return res


def stage_candidates(cfg: RunConfig, ctx: dict) -> StageOutcome:
    E = cfg.surface
    res = StageOutcome()
    table = candidate_table(E)
    ctx["table"] = table
    lines = ["label,mass,support,multiplicity,index,nullity,index_source,ordering_flags"]
    flags = ";".join(f"{k}={v}" for k, v in table.flags.items() if k != "W6-W7")
    for r in table.rows:
        support = " ".join(f"gamma{i}" for i in r.support)
        mult = " ".join(str(m) for m in r.multiplicity)
        lines.append(f"{r.label},{_fmt(r.mass)},{support},{mult},{r.index},{r.nullity},"
                     f"{r.index_source},{flags}")
    res.files["candidates.csv"] = "\n".join(lines) + "\n"
    res.data["candidates"] = {
        "lengths": list(table.lengths),
        "rows": [asdict(r) for r in table.rows],
        "flags": table.flags,
    }
    if E.strictly_ordered:
        for key in ("W1<W2<W3", "W4<W5<W6", "W5=(W4+W6)/2"):
            if not table.flags[key]:
                res.failures.append(f"candidate masses: {key} fails")
    return res


def stage_widths(cfg: RunConfig, ctx: dict) -> StageOutcome:
    res = StageOutcome()
    a = width_assignment(cfg.surface, ctx.get("table"), cfg.tolerances["tie"])
    ctx["assignment"] = a
    res.data["widths"] = a
    lines = ["scenario,k,label,mass,index,nullity,source"]
    if a["round"]:
        for w in a["widths"]:
            lines.append(f"-,{w['k']},-,{_fmt(w['mass'])},-,-,{w['source']}")
    else:
        for s in a["scenarios"]:
            for w in s["assignment"]:
                lines.append(f"omit {s['omitted']},{w['k']},{w['label']},{_fmt(w['mass'])},"
                             f"{w['index']},{w['nullity']},assumed-theorem")
        if a["ambiguous"]:
            res.warnings.append("candidate masses tie within tolerance; assignment ambiguous")
        elif not a["strictly_increasing"]:
            res.failures.append("assigned widths are not strictly increasing")
    res.files["widths.csv"] = "\n".join(lines) + "\n"
    return res


def stage_counterexample(cfg: RunConfig, ctx: dict) -> StageOutcome:
    res = StageOutcome()
    a = ctx["assignment"]
    if a["round"]:
        res.data["counterexample"] = {"skipped": "round sphere"}
        return res
    rep = counterexample_report(cfg.surface, a)
    res.data["counterexample"] = rep
    if not rep["every_scenario_violated"]:
        res.failures.append("some width scenario has no index-bound violation")
    return res


def stage_cone(cfg: RunConfig, ctx: dict) -> StageOutcome:
    """Cone identities over a great circle, two crossing circles and the Y-network."""
    tol = cfg.tolerances
    res = StageOutcome()
    # (base varifold, junction direction or None, density there)
    bases = {
        "great circle": (Varifold1(((great_circle([0, 0, 1], 720), 1),)), None, 1.0),
        "two circles": (Varifold1(((great_circle([0, 0, 1], 720), 1),
                                   (great_circle([1, 0, 0], 720), 1))), [0, 1, 0], 2.0),
        "Y-network": (Varifold1(fixtures.y_network(256).pieces), [0, 0, 1], 1.5),
    }
    rows = []
    rng = philox(cfg.seed, stream=7)
    y_growth = np.array([0.3, 0.4, 0.5]) / np.linalg.norm([0.3, 0.4, 0.5])
    for name, (V, junction, expected) in bases.items():
        C = build_cone(V, 1.0)
        curve = V.pieces[0][0]
        smooth = cone_density(C, 0.5 * curve.vertices[len(curve.vertices) // 3]).value
        growth = cone_mass_growth(build_cone(V, 20.0), y_growth)
        base_mass = sum(c.length * m for c, m in V.pieces)
        row = {"base": name, "ray_density": smooth, "mass_growth": growth, "base_mass": base_mass}
        if abs(smooth - 1.0) > tol["cone_density"]:
            res.failures.append(f"{name}: cone density {smooth:.4f} on a smooth ray")
        if junction is not None:
            dj = cone_density(C, 0.5 * np.array(junction, float)).value
            row["junction_density"], row["expected_junction_density"] = dj, expected
            if abs(dj - expected) > tol["cone_density"] * expected:
                res.failures.append(f"{name}: cone density {dj:.4f} on the junction ray")
        if abs(growth - base_mass) > tol["cone_growth"] * base_mass:
            res.failures.append(f"{name}: mass growth {growth:.4f} vs base mass {base_mass:.4f}")
        if name == "Y-network":
            fv = []
            for _ in range(4):
                X = random_bump_field(rng, C)
                fv.append(abs(first_variation(C, X)) / X.sup_norm())
            row["first_variation_ratio_max"] = max(fv)
            if max(fv) > tol["first_variation"]:
                res.failures.append(f"Y-cone first variation {max(fv):.2e} x sup|X|")
        rows.append(row)
    res.data["cone"] = rows
    return res


def stage_network(cfg: RunConfig, ctx: dict) -> StageOutcome:
    tol = cfg.tolerances
    res = StageOutcome()
    cases = []
    for c in fixtures.junction_cases():
        cls = classify_junction(c.junction)
        integer = is_integer_density(c.junction.density)
        resid = stationarity_residual(c.junction)
        cases.append({"name": c.name, "class": cls, "expected": c.expected_class,
                      "integer_density": integer, "residual": resid,
                      "agrees": cls == c.expected_class and integer == c.integer_density})
        if not cases[-1]["agrees"]:
            res.failures.append(f"junction case {c.name!r}: {cls}/{integer}")
    nets = {"Y-network": (fixtures.y_network(), True),
            "broken Y-network": (fixtures.broken_y_network(), False),
            "crossing circles": (fixtures.crossing_circles([[0, 0, 1], [1, 0, 0]]), True)}
    summary = []
    for name, (N, expected) in nets.items():
        rep = network_is_stationary(N, tol["junction"])
        ok_int, bad = integer_density_filter(N)
        summary.append({"network": name, "stationary": rep.stationary, "expected": expected,
                        "integer_densities": ok_int, "mass": N.mass})
        if rep.stationary != expected:
            res.failures.append(f"{name}: stationary={rep.stationary}, expected {expected}")
    res.files["curves/y_network.txt"] = io.dump_network(fixtures.y_network(64))
    res.data["network"] = {"junction_cases": cases, "networks": summary}
    return res


STAGE_FUNCS = {
    "scan": stage_scan, "index": stage_index, "candidates": stage_candidates,
    "widths": stage_widths, "counterexample": stage_counterexample,
    "cone": stage_cone, "network": stage_network,
}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if math.isfinite(v) else None
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, Path):
        return str(x)
    return x


def run(cfg: RunConfig, stages=COMMAND_STAGES["all"]) -> tuple[int, dict]:
    """Run the stages in order, write artifacts under ``cfg.out``, return (exit code, report)."""
    ctx: dict = {}
    report = {"config": cfg.as_dict(), "seed": cfg.seed, "stages": {}}
    failed: set = set()
    files: dict = {}
    warnings = []
    for name in stages:
        missing = [d for d in DEPENDS.get(name, ()) if d in failed or d not in report["stages"]]
        if missing:
            report["stages"][name] = {"status": "skipped", "reason": f"needs {', '.join(missing)}"}
            failed.add(name)
            continue
        try:
            out = STAGE_FUNCS[name](cfg, ctx)
        except ValueError as exc:
            log.error("stage %s failed: %s", name, exc)
            report["stages"][name] = {"status": "error", "error": str(exc)}
            failed.add(name)
            continue
        status = "fail" if out.failures else "ok"
        if out.failures:
            failed.add(name)
        report["stages"][name] = {"status": status, "failures": out.failures,
                                  "warnings": out.warnings, "result": out.data[name]}
        warnings.extend(out.warnings)
        files.update(out.files)
    for w in warnings:
        log.warning(w)
    report["low_confidence"] = any("LOW-CONFIDENCE" in w for w in warnings)
    report["assumptions"] = [
        "widths 1-3 are the principal geodesic lengths and widths 4-8 are five of W4..W9",
        "index and nullity of a sum of geodesics add",
        "true ellipsoid widths are not computed",
    ]
    report["exit_code"] = EXIT_INVARIANT if failed else EXIT_OK
    report = _jsonable(report)
    out_dir = cfg.out
    (out_dir / "curves").mkdir(parents=True, exist_ok=True)
    for rel, text in sorted(files.items()):
        (out_dir / rel).write_text(text)
    (out_dir / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return report["exit_code"], report


def run_all(cfg: RunConfig) -> tuple[int, dict]:
    return run(cfg, COMMAND_STAGES["all"])
