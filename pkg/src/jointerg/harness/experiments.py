"""
One runner per experiment kind.

Each runner returns ``(columns, rows, extra)``: string-valued CSV rows with
fixed columns and an optional JSON-able payload (PET traces). Verdicts are
computed by a separate function of ``(config, rows)`` only, so they can be
recomputed from a written CSV.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from ..algebra import Character, FolnerSequence, Ring, char_is_irrational
from ..averages import (PeriodicFamily, VectorFamily, average_sweep, mean_ergodic_check,
                        multi_average_fourier, counterexample_dependent, vdc_finite_set_check,
                        vdc_inequality_check)
from ..equidist import CharacterSumSpec, character_sum, default_threshold
from ..pet import PetBudgetError, pet_reduce, random_system, weight_less
from ..polynomials import PolySystem, is_independent
from ..seminorms import (NumericalIntegrityError, SeminormMethod, linear_seminorm_identity_check,
                         seminorm_closed_form_rotation, seminorm_truncated)
from ..systems import TrigObservable, parse_rotation
from .config import ExperimentConfig, decimal_value


@dataclass
class Output:
    columns: list
    rows: list
    extra: dict | None = None


def _r(x: float) -> str:
    return repr(float(x))


def _b(x: bool) -> str:
    return "true" if x else "false"


# -------------------------------------------------------- joint ergodicity


JOINT_COLUMNS = ["N", "size", "l2_distance", "target"]


def _independence_guard(cfg: ExperimentConfig, polys: PolySystem) -> None:
    if cfg.flag("params", "assert_independent", False):
        ok, witness = is_independent(polys)
        if not ok:
            raise cfg.error(
                f"polynomials asserted independent but is_independent found witness "
                f"{list(witness)}", "assert_independent")


def run_joint_ergodicity(cfg: ExperimentConfig, threads: int) -> Output:
    sys = cfg.rotation()
    folner = cfg.folner_sequence(sys.ring)
    polys = cfg.polys(sys.ring)
    obs = cfg.observables(sys.dim)
    if len(obs) != len(polys):
        raise cfg.error("need one observable per polynomial", "observables")
    _independence_guard(cfg, polys)
    schedule = cfg.int_list("params", "schedule")
    method = cfg.get("params", "method", "fourier")
    results = average_sweep(sys, list(polys), obs, folner, schedule, method=method,
                            threads=threads)
    return Output(JOINT_COLUMNS, [{k: str(v) for k, v in r.row().items()} for r in results])


def verdict_joint_ergodicity(cfg: ExperimentConfig, rows: list) -> dict:
    d = [float(r["l2_distance"]) for r in rows]
    out = {}
    thr = cfg.real("checks", "final_below")
    if thr is not None:
        out["final_below"] = d[-1] < thr
    if cfg.flag("checks", "strictly_decreasing", False):
        out["strictly_decreasing"] = all(b < a for a, b in zip(d, d[1:]))
    return out


# ---------------------------------------------------------- counterexample


COUNTER_COLUMNS = ["case", "N", "size", "l2_distance"]


def run_counterexample(cfg: ExperimentConfig, threads: int) -> Output:
    sys = cfg.rotation()
    folner = cfg.folner_sequence(sys.ring)
    a = cfg.integer("params", "a", required=True)
    rows = []
    for N in cfg.int_list("params", "schedule"):
        res = counterexample_dependent(sys, a, N, folner, threads=threads)
        rows.append({"case": f"dependent(a={a})", "N": str(N), "size": str(res.size),
                     "l2_distance": _r(res.l2_distance_to_product)})
    control = cfg.str_list("params", "control_polys", required=False)
    if control:
        polys = cfg.polys(sys.ring, "control_polys")
        obs = [TrigObservable.character(a), TrigObservable.character(-1)]
        for N in cfg.int_list("params", "control_schedule"):
            res = multi_average_fourier(sys, list(polys), obs, folner, N, threads=threads)
            rows.append({"case": "control", "N": str(N), "size": str(res.size),
                         "l2_distance": _r(res.l2_distance_to_product)})
    return Output(COUNTER_COLUMNS, rows)


def verdict_counterexample(cfg: ExperimentConfig, rows: list) -> dict:
    tol = cfg.real("checks", "unit_tol", "1e-12")
    dep = [float(r["l2_distance"]) for r in rows if r["case"].startswith("dependent")]
    out = {"dependent_distance_is_one": bool(dep) and all(abs(x - 1) <= tol for x in dep)}
    ctrl = [float(r["l2_distance"]) for r in rows if r["case"] == "control"]
    thr = cfg.real("checks", "control_below")
    if thr is not None:
        out["control_below"] = bool(ctrl) and ctrl[-1] < thr
    return out


# -------------------------------------------------------- equidistribution


EQUI_COLUMNS = ["spec", "N", "size", "re", "im", "abs", "threshold", "pass"]


def _spec_from_table(cfg: ExperimentConfig, t: dict, idx: int) -> tuple:
    ring = cfg.ring(t, "params.specs")
    chars = t.get("characters")
    if not isinstance(chars, list) or not chars:
        raise cfg.error(f"spec {idx}: characters must be a non-empty list", "characters")
    characters = []
    for c in chars:
        freq = c if isinstance(c, list) else [c]
        characters.append(Character(ring, tuple(decimal_value(x, "characters", cfg)
                                                for x in freq)))
    polys = cfg.polys(ring, texts=t.get("polys"))
    folner = cfg.folner_sequence(ring, t.get("folner", {}))
    spec = CharacterSumSpec(ring, characters, polys, folner, name=t.get("name", f"spec{idx}"))
    if t.get("assert_hypotheses", True):
        try:
            spec.validate_hypotheses()
        except ValueError as exc:
            raise cfg.error(f"spec {spec.name}: {exc}", "polys") from None
        for chi in characters:
            if ring.is_good():
                irr, w = char_is_irrational(chi)
                if not irr:
                    raise cfg.error(f"spec {spec.name}: character {chi.frequency} is "
                                    f"rational (chi({w} n) = 1)", "characters")
            elif chi.is_trivial():
                raise cfg.error(f"spec {spec.name}: trivial character", "characters")
    schedule = [int(decimal_value(x, "schedule", cfg)) for x in t.get("schedule", [])]
    if not schedule:
        raise cfg.error(f"spec {spec.name}: empty schedule", "schedule")
    return spec, schedule


def run_equidistribution(cfg: ExperimentConfig, threads: int) -> Output:
    tables = cfg.get("params", "specs", required=True)
    if not isinstance(tables, list):
        raise cfg.error("params.specs must be an array of tables", "specs")
    rows = []
    for idx, t in enumerate(tables):
        spec, schedule = _spec_from_table(cfg, t, idx)
        for N in schedule:
            v = character_sum(spec, N, threads)
            size = spec.folner.size(N)
            thr = default_threshold(size)
            rows.append({"spec": spec.name, "N": str(N), "size": str(size), "re": _r(v.real),
                         "im": _r(v.imag), "abs": _r(abs(v)), "threshold": _r(thr),
                         "pass": _b(abs(v) < thr)})
        if cfg.flag("params", "trivial_control", False):
            trivial = [Character(spec.ring, (0,) * spec.ring.dim) for _ in spec.characters]
            ctrl = CharacterSumSpec(spec.ring, trivial, spec.polys, spec.folner)
            N = schedule[-1]
            v = character_sum(ctrl, N, threads)
            rows.append({"spec": f"{spec.name}:trivial", "N": str(N),
                         "size": str(spec.folner.size(N)), "re": _r(v.real), "im": _r(v.imag),
                         "abs": _r(abs(v)), "threshold": "", "pass": _b(v == 1)})
    return Output(EQUI_COLUMNS, rows)


def verdict_equidistribution(cfg: ExperimentConfig, rows: list) -> dict:
    out = {}
    final: dict = {}
    for r in rows:
        if r["spec"].endswith(":trivial"):
            out[f"{r['spec']}_exactly_one"] = float(r["re"]) == 1.0 and float(r["im"]) == 0.0
        else:
            final[r["spec"]] = r
    for name, r in final.items():
        out[f"{name}_final_below_threshold"] = float(r["abs"]) < float(r["threshold"])
    return out


# ---------------------------------------------------------------- PET


PET_TRACE_COLUMNS = ["system", "node", "parent", "depth", "kind", "i0", "size", "degree",
                     "weight", "weight_decreases", "k"]
PET_CORPUS_COLUMNS = ["system", "polys", "status", "k", "depth", "detail"]


def _trace_rows(sysid: int, result) -> list:
    rows = []
    counter = [0]

    def visit(node, parent, parent_id, depth):
        nid = counter[0]
        counter[0] += 1
        if parent is None or node.kind == "doubling":
            dec = ""
        else:
            dec = _b(weight_less(node.weight, parent.weight))
        rows.append({"system": str(sysid), "node": str(nid),
                     "parent": "" if parent_id is None else str(parent_id),
                     "depth": str(depth), "kind": node.kind,
                     "i0": "" if node.i0 is None else str(node.i0), "size": str(node.size),
                     "degree": str(node.degree), "weight": str(node.weight),
                     "weight_decreases": dec, "k": "" if node.k is None else str(node.k)})
        for c in node.children:
            visit(c, node, nid, depth + 1)

    visit(result.trace, None, None, 0)
    return rows


def run_pet_trace(cfg: ExperimentConfig, threads: int) -> Output:
    max_depth = cfg.integer("params", "max_depth", "64")
    max_size = cfg.integer("params", "max_size", "4096")
    mode = cfg.get("params", "mode", "symbolic")
    if "corpus" in cfg.params:
        return _run_pet_corpus(cfg, max_depth, max_size, mode)
    tables = cfg.get("params", "systems", required=True)
    rows, traces = [], []
    for idx, t in enumerate(tables):
        ring = Ring.from_name(t.get("ring", "Z"))
        polys = cfg.polys(ring, texts=t.get("polys"))
        b = t.get("degree_bound")
        res = pet_reduce(polys, None if b is None else int(decimal_value(b, "degree_bound", cfg)),
                         max_depth=max_depth, max_size=max_size, mode=t.get("mode", mode),
                         seed=cfg.seed)
        rows.extend(_trace_rows(idx, res))
        traces.append({"system": polys.to_text(), "ring": ring.symbol, "k": res.k,
                       "depth": res.depth, "trace": res.trace.to_dict()})
    return Output(PET_TRACE_COLUMNS, rows, {"traces": traces})


def _run_pet_corpus(cfg, max_depth, max_size, mode) -> Output:
    c = cfg.get("params", "corpus")
    count = int(decimal_value(c.get("count", "100"), "count", cfg))
    ring = Ring.from_name(c.get("ring", "Z"))
    rng = random.Random(cfg.seed)
    rows = []
    for i in range(count):
        polys = random_system(ring, rng,
                              max_degree=int(decimal_value(c.get("max_degree", "3"), "max_degree", cfg)),
                              max_size=int(decimal_value(c.get("max_size", "3"), "max_size", cfg)),
                              coeff_bound=int(decimal_value(c.get("coeff_bound", "3"),
                                                            "coeff_bound", cfg)))
        try:
            res = pet_reduce(polys, max_depth=max_depth, max_size=max_size,
                             mode=c.get("mode", "specialized"), seed=cfg.seed + i)
            rows.append({"system": str(i), "polys": polys.to_text(), "status": "ok",
                         "k": str(res.k), "depth": str(res.depth), "detail": ""})
        except PetBudgetError as exc:
            rows.append({"system": str(i), "polys": polys.to_text(), "status": "budget",
                         "k": "", "depth": str(exc.depth), "detail": str(exc)})
    return Output(PET_CORPUS_COLUMNS, rows)


def verdict_pet_trace(cfg: ExperimentConfig, rows: list) -> dict:
    out = {}
    if rows and "status" in rows[0]:
        limit = cfg.integer("checks", "max_total_depth", "50")
        out["all_terminate"] = all(r["status"] == "ok" for r in rows)
        out["depth_below_limit"] = all(r["status"] == "ok" and int(r["depth"]) < limit
                                       for r in rows)
        return out
    tables = cfg.get("params", "systems", default=[])
    for idx, t in enumerate(tables):
        mine = [r for r in rows if r["system"] == str(idx)]
        label = t.get("label", f"system{idx}")
        if "expected_k" in t:
            ks = [int(r["k"]) for r in mine if r["k"]]
            out[f"{label}_k"] = sum(ks) == int(decimal_value(t["expected_k"], "expected_k"))
        if "golden_weights" in t:
            got = [r["weight"] for r in mine if r["kind"] != "doubling"]
            want = ["(" + ",".join(w) + ")" for w in t["golden_weights"]]
            out[f"{label}_golden_trace"] = got == want
        out[f"{label}_weights_decrease"] = all(r["weight_decreases"] == "true"
                                               for r in mine if r["weight_decreases"])
    return out


# ------------------------------------------------------------ seminorms


SEMINORM_COLUMNS = ["section", "observable", "s", "N", "method", "value", "reference",
                    "bound"]


def run_seminorm_table(cfg: ExperimentConfig, threads: int) -> Output:
    sys = cfg.rotation()
    folner = cfg.folner_sequence(sys.ring)
    texts = cfg.str_list("params", "observables")
    obs = cfg.observables(sys.dim)
    s_values = cfg.int_list("params", "s")
    N = cfg.integer("params", "N", required=True)
    methods = cfg.str_list("params", "methods", required=False) or ["fejer", "closed_form"]
    rows = []

    def add(section, text, s, n, method, value, reference="", bound=""):
        rows.append({"section": section, "observable": text, "s": str(s), "N": str(n),
                     "method": method, "value": value, "reference": reference,
                     "bound": bound})

    for text, f in zip(texts, obs):
        for s in s_values:
            for m in methods:
                if m == "closed_form":
                    est = seminorm_closed_form_rotation(sys, f, s, require_ergodic=False)
                    add("table", text, s, "", m, _r(est.value))
                    continue
                try:
                    est = seminorm_truncated(sys, f, s, N, folner, SeminormMethod(m), threads)
                    add("table", text, s, N, m, _r(est.value))
                except NumericalIntegrityError as exc:
                    add("table", text, s, N, m, "integrity-error", str(exc))
    for text in cfg.str_list("params", "eigenfunctions", required=False):
        f = cfg.observables(sys.dim, texts=[text])[0]
        for s in s_values:
            if s >= 2:
                est = seminorm_closed_form_rotation(sys, f, s, require_ergodic=False)
                add("eigen", text, s, "", "closed_form", _r(est.value))
    for t in cfg.get("params", "identity", default=[]):
        isys = parse_rotation(cfg.ring(t, "params.identity"), t["phi"])
        f = cfg.observables(isys.dim, texts=[t["f"]])[0]
        p = cfg.polys(isys.ring, texts=[t["p"]])[0]
        k = int(decimal_value(t["k"], "k", cfg))
        n = int(decimal_value(t["N"], "N", cfg))
        ifol = cfg.folner_sequence(isys.ring, t.get("folner", {}))
        res = linear_seminorm_identity_check(isys, f, p, k, n, ifol)
        add(f"identity:{isys.ring.symbol}", t["f"], k, n, f"p={t['p']}", _r(res.lhs),
            _r(res.rhs), str(res.bound_factor))
    return Output(SEMINORM_COLUMNS, rows)


def verdict_seminorm_table(cfg: ExperimentConfig, rows: list) -> dict:
    out = {}
    mono_tol = cfg.real("checks", "monotone_tol", "0.02")
    oracle_tol = cfg.real("checks", "oracle_tol", "0.05")
    identity_tol = cfg.real("checks", "identity_tol", "0.05")
    primary = cfg.get("checks", "estimator", "fejer")
    table: dict = {}
    for r in rows:
        if r["section"] == "table" and r["value"] != "integrity-error":
            table[(r["observable"], int(r["s"]), r["method"])] = float(r["value"])
    obs = sorted({k[0] for k in table})
    svals = sorted({k[1] for k in table})
    mono = True
    oracle = True
    for o in obs:
        for s1, s2 in zip(svals, svals[1:]):
            a, b = table.get((o, s1, primary)), table.get((o, s2, primary))
            if a is not None and b is not None and a > b + mono_tol:
                mono = False
        for s in svals:
            a, c = table.get((o, s, primary)), table.get((o, s, "closed_form"))
            if a is None or c is None or abs(a - c) >= oracle_tol:
                oracle = False
    out["monotone"] = mono
    out["estimator_vs_closed_form"] = oracle
    eig = [float(r["value"]) for r in rows if r["section"] == "eigen"]
    if eig:
        out["eigenfunctions_exactly_one"] = all(v == 1.0 for v in eig)
    ident = [r for r in rows if r["section"].startswith("identity:")]
    for i, r in enumerate(ident):
        lhs, rhs, c = float(r["value"]), float(r["reference"]), int(r["bound"])
        key = f"identity{i}:{r['section'][9:]}:{r['method']}:f={r['observable']}"
        if c == 1:
            out[key] = abs(lhs - rhs) < identity_tol
        else:
            out[key] = lhs <= c * rhs + 1e-9
    return out


# ---------------------------------------------------------------- vdC


VDC_COLUMNS = ["section", "trial", "lhs", "rhs", "remainder", "remainder_stated", "slack",
               "holds", "holds_stated"]


def run_vdc_check(cfg: ExperimentConfig, threads: int) -> Output:
    ring = cfg.ring()
    rng = np.random.default_rng(cfg.seed)
    trials = cfg.integer("params", "trials", "1000")
    dim = cfg.integer("params", "dim", "8")
    N = cfg.integer("params", "N", "20")
    M = cfg.integer("params", "M", "20")
    fol = FolnerSequence(ring)
    rows = []
    for t in range(trials):
        x = VectorFamily.random(ring, N + M, dim, rng)
        r = vdc_inequality_check(x, fol, N, fol, M)
        rows.append({"section": "random", "trial": str(t), "lhs": _r(r.lhs), "rhs": _r(r.rhs),
                     "remainder": _r(r.remainder), "remainder_stated": _r(r.remainder_stated),
                     "slack": _r(r.slack), "holds": _b(r.holds),
                     "holds_stated": _b(r.holds_stated)})
    per = cfg.get("params", "periodic", default=None)
    if per:
        count = int(decimal_value(per.get("count", "50"), "count", cfg))
        max_period = int(decimal_value(per.get("max_period", "6"), "max_period", cfg))
        pdim = int(decimal_value(per.get("dim", "3"), "dim", cfg))
        box = int(decimal_value(per.get("N", "30"), "N", cfg))
        half = FolnerSequence(ring, half_open=True)
        span = math.lcm(*range(1, max_period + 1))
        if (2 * box) % span:
            raise cfg.error(f"periodic N={box}: side {2 * box} must be a multiple of {span}",
                            "periodic")
        for t in range(count):
            period = int(rng.integers(1, max_period + 1))
            shape = (period,) * ring.dim + (pdim,)
            vals = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
            size = int(rng.integers(1, 5))
            S = [ring.from_coords([int(v) for v in rng.integers(-5, 6, ring.dim)])
                 for _ in range(size)]
            r = vdc_finite_set_check(PeriodicFamily(ring, period, vals), S, half, box)
            rows.append({"section": "periodic", "trial": str(t), "lhs": _r(r.lhs),
                         "rhs": _r(r.rhs), "remainder": "0.0", "remainder_stated": "0.0",
                         "slack": _r(r.rhs - r.lhs), "holds": _b(r.holds),
                         "holds_stated": _b(r.holds)})
    return Output(VDC_COLUMNS, rows)


def verdict_vdc_check(cfg: ExperimentConfig, rows: list) -> dict:
    rnd = [r for r in rows if r["section"] == "random"]
    per = [r for r in rows if r["section"] == "periodic"]
    out = {"random_holds": bool(rnd) and all(r["holds"] == "true" and float(r["slack"]) >= 0
                                             for r in rnd)}
    if per:
        out["periodic_holds"] = all(r["holds"] == "true" for r in per)
    return out


# ------------------------------------------------------------ mean ergodic


MEAN_COLUMNS = ["N", "size", "deviation"]


def run_mean_ergodic(cfg: ExperimentConfig, threads: int) -> Output:
    sys = cfg.rotation()
    folner = cfg.folner_sequence(sys.ring)
    f = cfg.observables(sys.dim, "observable", texts=[cfg.get("params", "observable",
                                                              required=True)])[0]
    rows = []
    for N in cfg.int_list("params", "schedule"):
        res = mean_ergodic_check(sys, f, folner, N, threads=threads)
        rows.append({"N": str(N), "size": str(res.size), "deviation": _r(res.deviation)})
    return Output(MEAN_COLUMNS, rows)


def verdict_mean_ergodic(cfg: ExperimentConfig, rows: list) -> dict:
    d = [float(r["deviation"]) for r in rows]
    out = {}
    thr = cfg.real("checks", "final_below")
    if thr is not None:
        out["final_below"] = d[-1] < thr
    if cfg.flag("checks", "exactly_zero", False):
        out["exactly_zero"] = all(x == 0.0 for x in d)
    return out


RUNNERS = {
    "joint-ergodicity": (run_joint_ergodicity, verdict_joint_ergodicity),
    "counterexample": (run_counterexample, verdict_counterexample),
    "equidistribution": (run_equidistribution, verdict_equidistribution),
    "pet-trace": (run_pet_trace, verdict_pet_trace),
    "seminorm-table": (run_seminorm_table, verdict_seminorm_table),
    "vdc-check": (run_vdc_check, verdict_vdc_check),
    "mean-ergodic": (run_mean_ergodic, verdict_mean_ergodic),
}


def pet_trace_adhoc(texts: list, ring: Ring, *, mode: str = "symbolic", max_depth: int = 64,
                    max_size: int = 4096, seed: int = 0) -> Output:
    polys = PolySystem.parse(texts, ring)
    res = pet_reduce(polys, max_depth=max_depth, max_size=max_size, mode=mode, seed=seed)
    trace = {"system": polys.to_text(), "ring": ring.symbol, "k": res.k, "depth": res.depth,
             "trace": res.trace.to_dict()}
    return Output(PET_TRACE_COLUMNS, _trace_rows(0, res), {"traces": [trace]})

