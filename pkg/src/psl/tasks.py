"""Task-file dispatch: validate a JSON task, run it, build a deterministic report.

Every runner returns ``(report, verdict)`` where ``verdict`` is the boolean
the exit code reports.  Nothing time- or machine-dependent enters a report
unless timing was requested.
"""

from __future__ import annotations

import json
import time
from pathlib import Path

from . import __version__
from .cluster import (
    CompatiblePair,
    Seed,
    check_compatible,
    laurent_check,
    isogeny_decomposition,
    mutate_pair,
    mutate_seed,
    mutation_sequence,
)
from .dmod import (
    CandidateRejected,
    Connection,
    check_flat,
    check_lift,
    eigenvalue_forms,
    is_lagrangian_differential,
    p_curvature,
    support_equations,
    support_generators,
    trace_form,
)
from .errors import DegreeExceeded, InputError, ModeInapplicable, PslError, SchemaError, SearchExhausted, UnsupportedMode
from .multipoly import PolyRing
from .psupport import PoissonStructure, SupportIdeal, lagrangian_certificate
from .qmod import (
    QConnection,
    QuantumTorus,
    SymplecticMatrix,
    bernstein_step,
    check_lift_q,
    check_qflat,
    is_lagrangian_q,
    n_curvature,
    q_graph_ideal,
    sp_twist,
)
from .rings import construct_ring

KINDS = ("differential", "q", "certify", "lift_check", "sp_twist", "bernstein_step", "mutate", "compatible", "isogeny")
DEFAULT_MAX_DEGREE = 4096


def load_task(source) -> dict:
    if isinstance(source, dict):
        return source
    text = Path(source).read_text()
    try:
        task = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"task file is not valid JSON: {exc}") from None
    if not isinstance(task, dict):
        raise SchemaError("a task file holds one JSON object")
    return task


def _require(task, key, kind=None):
    if key not in task:
        raise SchemaError(f"task of kind {task.get('kind')!r} needs field {key!r}")
    value = task[key]
    if kind is not None and not isinstance(value, kind):
        raise SchemaError(f"field {key!r} must be {kind.__name__ if isinstance(kind, type) else kind}")
    return value


def _check_matrices(mats, name="a"):
    if not isinstance(mats, list) or not mats:
        raise SchemaError(f"field {name!r} must be a nonempty list of matrices")
    for m in mats:
        if not isinstance(m, list) or not m or not all(isinstance(row, list) for row in m):
            raise SchemaError(f"each entry of {name!r} must be a matrix (list of rows)")
        if any(len(row) != len(m) for row in m):
            raise SchemaError(f"matrices in {name!r} must be square")
        for row in m:
            for x in row:
                if not isinstance(x, (str, int)) or isinstance(x, bool):
                    raise SchemaError(f"matrix entries must be polynomial strings, got {x!r}")
    return [[[str(x) for x in row] for row in m] for m in mats]


def _check_shape(task, mats):
    r, n = len(mats), len(mats[0])
    if "r" in task and task["r"] != r:
        raise SchemaError(f"r = {task['r']} but {r} matrices were given")
    if "n" in task and task["n"] != n:
        raise SchemaError(f"n = {task['n']} but the matrices are {n}x{n}")
    if any(len(m) != n for m in mats):
        raise SchemaError("all matrices must have the same size")


def _guard(mats, factor, limit):
    deg = max((m.max_degree() for m in mats), default=0)
    if deg * factor > limit:
        raise DegreeExceeded(f"predicted curvature degree {deg * factor} exceeds max_degree = {limit}")


def _q_value(ring, q):
    if isinstance(q, bool) or not isinstance(q, (int, str)):
        raise SchemaError("q must be an integer or a polynomial in u")
    if isinstance(q, int):
        return ring.coerce(q)
    R = PolyRing(ring, ())
    value = R.parse(q)
    return value.constant_coefficient().value


def _forms_json(forms):
    return [f.to_json() for f in forms]


# --- runners -------------------------------------------------------------

def _eigen_forms(family, task, options):
    em = task.get("eigen_mode")
    if em is None:
        if task.get("candidates"):
            em = "verify"
        elif family.n == 1:
            em = "rank1"
        elif all(m.is_upper_triangular() for m in family.C):
            em = "triangular"
        else:
            raise ModeInapplicable("no eigenvalue mode applies: supply candidates or use --mode ideal")
    return em, eigenvalue_forms(family, em, task.get("candidates"))


def run_differential(task, options):
    ring = construct_ring(_require(task, "ring", dict))
    mats = _check_matrices(_require(task, "a"))
    _check_shape(task, mats)
    conn = Connection(ring, mats)
    _guard(conn.a, ring.characteristic, task.get("max_degree", DEFAULT_MAX_DEGREE))
    report = {"flatness": check_flat(conn).to_json()}
    if not report["flatness"]["flat"]:
        report["lagrangian"] = None
        return report, False
    fam = p_curvature(conn, oracle=options.get("oracle", False))
    report["p"] = fam.order
    report["p_curvature"] = fam.to_json()
    report["commute"] = fam.commute()
    report["invariants_annihilated"] = fam.invariants_hold()
    report["support_generators"] = [str(g) for g in support_generators(fam)]
    report["trace_form"] = trace_form(fam).to_json()
    if options.get("oracle"):
        report["oracle"] = {"weyl_expansion": "agrees"}
    mode = options.get("mode") or task.get("mode") or "eigen"
    report["mode"] = mode
    if mode == "eigen":
        em, forms = _eigen_forms(fam, task, options)
        verdict = is_lagrangian_differential(forms)
        report["eigen"] = {"mode": em, "forms": _forms_json(forms), **verdict.to_json()}
        report["lagrangian"] = verdict.lagrangian
    elif mode == "ideal":
        cert = lagrangian_certificate(support_equations(fam), task.get("order", "grlex"),
                                      pth_roots=fam.order if task.get("pth_roots", True) else None)
        report["certificate"] = cert.to_json()
        report["lagrangian"] = cert.lagrangian
    else:
        raise UnsupportedMode(f"unknown mode {mode!r}")
    return report, report["lagrangian"]


def run_q(task, options):
    ring = construct_ring(_require(task, "ring", dict))
    q = _q_value(ring, _require(task, "q"))
    N = _require(task, "N", int)
    mats = _check_matrices(_require(task, "a"))
    _check_shape(task, mats)
    inverses = task.get("inverses")
    if inverses is not None:
        inverses = _check_matrices(inverses, "inverses")
    conn = QConnection(ring, q, mats, inverses=inverses)
    _guard(conn.a, N, task.get("max_degree", DEFAULT_MAX_DEGREE))
    report = {"flatness": check_qflat(conn).to_json(), "N": N}
    if not report["flatness"]["flat"]:
        report["lagrangian"] = None
        return report, False
    fam = n_curvature(conn, N, oracle=options.get("oracle", False))
    report["n_curvature"] = fam.to_json()
    report["commute"] = fam.commute()
    report["invariants_shift_fixed"] = fam.invariants_hold()
    if options.get("oracle"):
        report["oracle"] = {"repeated_application": "agrees"}
    mode = options.get("mode") or task.get("mode") or "eigen"
    report["mode"] = mode
    if mode == "eigen":
        em, forms = _eigen_forms(fam, task, options)
        verdict = is_lagrangian_q(forms)
        report["eigen"] = {"mode": em, "forms": _forms_json(forms), **verdict.to_json()}
        report["lagrangian"] = verdict.lagrangian
    elif mode == "ideal":
        em, forms = _eigen_forms(fam, task, options)
        certs = [lagrangian_certificate(q_graph_ideal(f)) for f in forms]
        report["certificates"] = [c.to_json() for c in certs]
        report["lagrangian"] = all(c.lagrangian for c in certs)
    else:
        raise UnsupportedMode(f"unknown mode {mode!r}")
    return report, report["lagrangian"]


def run_certify(task, options):
    ring = construct_ring(task.get("ring", {"kind": "prime", "p": 2}))
    names = _require(task, "variables", list)
    if not all(isinstance(n, str) for n in names):
        raise SchemaError("variables must be strings")
    gens = _require(task, "generators", list)
    structure = PoissonStructure.from_json(task.get("structure", "canonical"))
    r = _require(task, "r", int)
    amb = PolyRing(ring, names, bool(task.get("laurent", False)))
    ideal = SupportIdeal(amb, [str(g) for g in gens], structure, r)
    cert = lagrangian_certificate(ideal, task.get("order", "grlex"), task.get("pth_roots"))
    return {"certificate": cert.to_json(), "lagrangian": cert.lagrangian}, cert.lagrangian


def _lift_rings(task):
    if "rings" in task:
        rings = _require(task, "rings", list)
    else:
        rings = [_require(task, "ring", dict)]
    return [construct_ring(d) for d in rings]


def run_lift_check(task, options):
    setting = task.get("setting", "differential")
    lifts = _check_matrices(_require(task, "lift"), "lift")
    targets = _check_matrices(_require(task, "target"), "target")
    results = []
    for S in _lift_rings(task):
        rmap = S.residue_map()
        k = rmap.target
        if setting == "differential":
            lift = Connection(S, lifts)
            target = Connection(k, targets)
            res = check_lift(lift, rmap, target).to_json()
            res["liftable"] = res["flat_over_S"] and res["reduction_matches"]
        elif setting == "q":
            N = _require(task, "N", int)
            lift = QConnection(S, _q_value(S, _require(task, "q_lift")), lifts)
            target = QConnection(k, _q_value(k, _require(task, "q_target")), targets)
            res = check_lift_q(lift, rmap, target, N).to_json()
            res["liftable"] = res["flat_over_S"] and res["reduction_matches"] and res["qN_not_one"]
        else:
            raise SchemaError(f"unknown lift setting {setting!r}")
        res["ring"] = S.descriptor()
        res["residue_field"] = k.descriptor()
        results.append(res)
    verdict = any(r["liftable"] for r in results)
    return {"results": results, "liftable": verdict}, verdict


def _torus_from(task):
    ring = construct_ring(_require(task, "ring", dict))
    q = _q_value(ring, _require(task, "q"))
    s = task.get("s")
    s = None if s is None else _q_value(ring, s)
    if "form" in task:
        return QuantumTorus(ring, task["form"], q, s)
    return QuantumTorus.weyl(ring, _require(task, "r", int), q, s)


def _element(torus, spec):
    if not isinstance(spec, list):
        raise SchemaError("element must be a list of [vector, coefficient] pairs")
    acc = torus.zero()
    for item in spec:
        if not (isinstance(item, list) and len(item) == 2 and isinstance(item[0], list)):
            raise SchemaError("element terms are [vector, coefficient] pairs")
        acc = acc + torus.E(item[0], _q_value(torus.ring, item[1]))
    return acc


def _element_json(el):
    R = el.torus.ring
    return [[list(v), R.format(el.terms[v])] for v in sorted(el.terms)]


def run_sp_twist(task, options):
    g = SymplecticMatrix(_require(task, "g", list))
    torus = _torus_from(task)
    el = _element(torus, _require(task, "element"))
    image = sp_twist(g, el)
    # relation check: the images of the generators still commute like the originals
    preserved = True
    for i in range(torus.rank):
        for j in range(torus.rank):
            a, b = torus.gen(i), torus.gen(j)
            lhs = sp_twist(g, a) * sp_twist(g, b)
            rhs = sp_twist(g, b) * sp_twist(g, a) * torus.scalar(torus.ring.pow(torus.q, torus.form[i][j]))
            preserved = preserved and lhs == rhs
    return {"image": _element_json(image), "relations_preserved": preserved,
            "s": torus.ring.format(torus.s)}, preserved


def run_bernstein(task, options):
    mons = _require(task, "monomials", list)
    depth = options.get("depth") if options.get("depth") is not None else task.get("depth", 8)
    seed = options.get("seed") if options.get("seed") is not None else task.get("seed", 0)
    try:
        res = bernstein_step(mons, depth=depth, seed=seed)
    except SearchExhausted as exc:
        return {"found": False, "reason": str(exc)}, False
    return {"found": True, **res.to_json()}, True


def run_mutate(task, options):
    B = _require(task, "B", list)
    seed = Seed(B, task.get("D"))
    word = _require(task, "word", list)
    if not all(isinstance(k, int) and not isinstance(k, bool) for k in word):
        raise SchemaError("mutation word must be a list of integers")
    steps = []
    s = seed
    pair = CompatiblePair(task["Lambda"], seed) if "Lambda" in task else None
    for k in word:
        s = mutate_seed(s, k)
        step = {"k": k, "B": s.tolist(), "skew_symmetrizable": s.is_skew_symmetrizable()}
        if pair is not None:
            pair = mutate_pair(pair, k)
            step["Lambda"] = [list(r) for r in pair.Lam]
            step["D"] = list(pair.D)
        steps.append(step)
    _, chart = mutation_sequence(seed, word)
    report = {"steps": steps, "cluster": chart.strings(), "D": list(seed.D)}
    ok = all(st["skew_symmetrizable"] for st in steps)
    if task.get("laurent_depth"):
        good, count, bad = laurent_check(seed, task["laurent_depth"])
        report["laurent_check"] = {"ok": good, "variables": count, "offending_word": bad}
        ok = ok and good
    return report, ok


def run_compatible(task, options):
    res = check_compatible(_require(task, "Lambda", list), _require(task, "B", list))
    return res.to_json(), res.compatible


def run_isogeny(task, options):
    res = isogeny_decomposition(_require(task, "Lambda", list))
    return res.to_json(), res.checks_pass and res.unimodular


RUNNERS = {
    "differential": run_differential,
    "q": run_q,
    "certify": run_certify,
    "lift_check": run_lift_check,
    "sp_twist": run_sp_twist,
    "bernstein_step": run_bernstein,
    "mutate": run_mutate,
    "compatible": run_compatible,
    "isogeny": run_isogeny,
}


def run_task(source, kind: str | None = None, **options):
    """Run one task; returns ``(report, exit_code)``.

    Exit codes: 0 computed true, 1 computed false, 2 input error,
    3 unsupported mode.
    """
    started = time.perf_counter()
    try:
        task = load_task(source)
        task_kind = task.get("kind", kind)
        if kind is not None and task_kind != kind:
            raise SchemaError(f"command kind {kind!r} does not match task kind {task_kind!r}")
        if task_kind not in RUNNERS:
            raise SchemaError(f"unknown task kind {task_kind!r}; expected one of {', '.join(KINDS)}")
        body, verdict = RUNNERS[task_kind](task, options)
        code = 0 if verdict else 1
        report = {"tool": "psl", "version": __version__, "kind": task_kind, "task": task,
                  "verdict": bool(verdict), **body}
    except UnsupportedMode as exc:
        report, code = _error_report(exc, source), 3
    except CandidateRejected as exc:
        report, code = _error_report(exc, source), 1
        report["failing_component"] = exc.index
    except (InputError, PslError) as exc:
        report, code = _error_report(exc, source), 2
    except (OSError, ValueError, TypeError, KeyError) as exc:
        report, code = _error_report(exc, source), 2
    if options.get("timing"):
        report["timing_seconds"] = round(time.perf_counter() - started, 6)
    report["exit_code"] = code
    return report, code


def _error_report(exc, source):
    return {"tool": "psl", "version": __version__, "error": type(exc).__name__, "message": str(exc),
            "task": source if isinstance(source, dict) else str(source)}


def dumps(report) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
