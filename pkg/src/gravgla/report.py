"""The verification suite: a registry of checks and a versioned JSON report."""

from __future__ import annotations

import fnmatch
import json
import random
import time
from dataclasses import dataclass
from fractions import Fraction

import jsonschema

SCHEMA_VERSION = "1.0"

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema_version", "seed", "config", "checks", "summary"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "seed": {"type": "integer"},
        "config": {"type": "object"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "criterion", "reference", "status", "witness", "runtime"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "criterion": {"type": "integer", "minimum": 1, "maximum": 7},
                    "reference": {"type": "string"},
                    "status": {"enum": ["pass", "fail"]},
                    "witness": {"type": "object"},
                    "runtime": {"type": "number", "minimum": 0},
                },
            },
        },
        "summary": {
            "type": "object",
            "required": ["passed", "failed"],
            "properties": {"passed": {"type": "integer"}, "failed": {"type": "integer"}},
        },
    },
}

DEFAULT_CONFIG = {"seed": 0, "samples": 50, "tamper_ideal": False, "mc_order": 6, "jobs": 1}


class ConfigError(ValueError):
    pass


def load_config(path=None, **overrides) -> dict:
    cfg = dict(DEFAULT_CONFIG)
    if path is not None:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(data) - set(DEFAULT_CONFIG)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(data)
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    for key in ("seed", "samples", "mc_order", "jobs"):
        if not isinstance(cfg[key], int) or isinstance(cfg[key], bool):
            raise ConfigError(f"{key} must be an integer")
    if cfg["samples"] < 1 or cfg["jobs"] < 1 or not 1 <= cfg["mc_order"] <= 12:
        raise ConfigError("samples, jobs must be positive and mc_order in 1..12")
    if not isinstance(cfg["tamper_ideal"], bool):
        raise ConfigError("tamper_ideal must be a boolean")
    return cfg


@dataclass
class Check:
    name: str
    criterion: int
    reference: str
    func: object


def _js(x):
    """JSON-friendly copy: Fractions as strings, tuples as lists."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _js(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_js(v) for v in x]
    if isinstance(x, float):
        return float(f"{x:.6e}")
    return x


# --- random elements ------------------------------------------------------------------
def random_poly(rng: random.Random, degree: int = 2):
    from .scalars import X, Scalar

    f = Scalar(rng.randint(-3, 3))
    for _ in range(rng.randint(0, 2)):
        m = Scalar(rng.choice([-2, -1, 1, 2]))
        for _ in range(rng.randint(1, degree)):
            m = m * X[rng.randrange(4)]
        f = f + m
    return f


def random_l_element(rng: random.Random, grade: int, terms: int = 3, constant: bool = False):
    from .clifford import MONOS_OF_DEGREE
    from .frames import NGEN
    from .glaoid import LElement

    t = {}
    for _ in range(terms):
        key = (rng.choice(MONOS_OF_DEGREE[grade]), rng.randrange(NGEN))
        t[key] = rng.randint(-3, 3) if constant else random_poly(rng)
    return LElement(t)


def random_ext(rng: random.Random, grade: int):
    from .clifford import MONOS_OF_DEGREE, ExtElement

    return ExtElement({m: random_poly(rng) for m in rng.sample(MONOS_OF_DEGREE[grade], 1)})


# --- checks ------------------------------------------------------------------------------
def _ranks_ideal(cfg):
    from .glaoid import default_ideal, rank_table

    t = rank_table(default_ideal())
    ok = (tuple(t["I"]) == (0, 0, 10, 16, 6) and tuple(t["L"]) == (11, 44, 66, 44, 11)
          and tuple(t["E"]) == (11, 44, 56, 28, 5))
    return ok, t


def _ranks_slashed(cfg):
    from .slashed import rank_tables, slashed_ideal

    t = rank_tables()
    ok = (tuple(t["Lslash"]) == (11, 44, 77, 88, 88) and tuple(t["Pslash"]) == (21, 48, 67, 72, 72)
          and tuple(t["image"]) == (11, 44, 67, 72, 72) and tuple(t["Islash"]) == (0, 0, 10, 16, 16)
          and t["Islash_total"] == 32 and len(slashed_ideal()) == 32)
    return ok, t


def _ranks_aux(cfg):
    from .slashed import auxiliary_table

    t = auxiliary_table()
    ok = (tuple(t["left"]) == (6, 24, 42, 48, 48) and tuple(t["right"]) == (16, 28, 32, 32, 32)
          and t["surjective"] == [False, False, True, True, True])
    return ok, t


def _ranks_herm(cfg):
    from .gauge import condition_i_dimension, herm_to_b_rank

    r, d = herm_to_b_rank(), condition_i_dimension()
    return r == 324 and d == 324, {"rank": r, "condition_i_dimension": d}


def _ranks_group(cfg):
    from .clifford import clifford_group

    n = len(clifford_group())
    return n == 32, {"order": n}


def _jacobi(cfg):
    from .glaoid import l_bracket

    rng = random.Random(cfg["seed"])
    for n in range(cfg["samples"]):
        p, q, r = (rng.randint(0, 2) for _ in range(3))
        while p + q + r > 4:
            p, q, r = (rng.randint(0, 2) for _ in range(3))
        a, b, c = (random_l_element(rng, g, 2) for g in (p, q, r))
        lhs = l_bracket(a, l_bracket(b, c))
        rhs = l_bracket(l_bracket(a, b), c) + l_bracket(b, l_bracket(a, c)).scale(-1 if p * q % 2 else 1)
        if lhs != rhs:
            return False, {"instance": n, "grades": [p, q, r]}
    return True, {"instances": cfg["samples"]}


def _anchor(cfg):
    from .glaoid import anchor, graded_commutator_apply, l_bracket

    rng = random.Random(cfg["seed"] + 1)
    for n in range(cfg["samples"]):
        p, q = rng.randint(0, 2), rng.randint(0, 2)
        a, b = random_l_element(rng, p, 2), random_l_element(rng, q, 2)
        w = random_ext(rng, rng.randint(0, 4 - p - q))
        if anchor(l_bracket(a, b))(w) != graded_commutator_apply(a, b, w):
            return False, {"instance": n}
    return True, {"instances": cfg["samples"]}


def tampered_ideal():
    """The default I with one sign flipped in one degree-2 basis element."""
    from .glaoid import IdealBasis, LElement, ideal_basis_explicit

    basis = list(ideal_basis_explicit())
    first = basis[0]
    key = sorted(first.terms, key=repr)[0]
    t = dict(first.terms)
    t[key] = -t[key]
    basis[0] = LElement(t)
    return IdealBasis(basis)


def _ideal_closure(cfg):
    from .glaoid import default_ideal, l_bracket

    ideal = tampered_ideal() if cfg["tamper_ideal"] else default_ideal()
    rng = random.Random(cfg["seed"] + 2)
    gens = {k: ideal.elements(k) for k in (2, 3, 4)}
    for n in range(cfg["samples"]):
        k = rng.choice((2, 2, 3))
        b = rng.choice(gens[k]).scale(random_poly(rng))
        j = rng.randint(0, 4 - k)
        a = random_l_element(rng, j, 3)
        y = ideal.reduce(l_bracket(a, b))
        if not y.is_zero():
            return False, {"instance": n, "degree": [j, k], "residue": repr(y)[:400]}
    return True, {"instances": cfg["samples"]}


def _average(cfg):
    from .clifford import THETA, invariant_average

    pi = invariant_average().tensor()
    rng = random.Random(cfg["seed"] + 3)
    ok = pi.mul(pi) == pi
    triples = [(3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25)]
    tried = 0
    for _ in range(cfg["samples"]):
        a, b, c = rng.choice(triples)
        i, j = rng.sample(range(1, 4), 2)
        # boost in the (0, i) plane and rotation in the (i, j) plane, both rational
        boost = [THETA[0].scale(Fraction(c, b)) + THETA[i].scale(Fraction(a, b)),
                 THETA[0].scale(Fraction(a, b)) + THETA[i].scale(Fraction(c, b))]
        frame = list(THETA)
        frame[0], frame[i] = boost
        ri, rj = frame[i], frame[j]
        frame[i] = ri.scale(Fraction(a, c)) + rj.scale(Fraction(b, c))
        frame[j] = ri.scale(Fraction(-b, c)) + rj.scale(Fraction(a, c))
        tried += 1
        if invariant_average(frame).tensor() != pi:
            ok = False
            break
    return ok, {"idempotent": pi.mul(pi) == pi, "frames": tried}


def _gauge_i(cfg):
    from .gauge import HermForm, build_b, cl_action_A, NE

    rng = random.Random(cfg["seed"] + 4)
    forms = [build_b(HermForm.random_positive(cfg["seed"] + s)) for s in range(5)]
    L = [cl_action_A(1 << a) for a in range(4)]
    for n in range(cfg["samples"]):
        B = forms[n % 5]
        x = [rng.randint(-2, 2) for _ in range(NE)]
        y = [rng.randint(-2, 2) for _ in range(NE)]
        w = [rng.randint(-3, 3) for _ in range(4)]

        def form(u, v):
            return sum(u[i] * B[i, j] * v[j] for i in range(NE) if u[i] for j in range(NE) if v[j])

        def act(v):
            out = [0] * NE
            for a in range(4):
                if w[a]:
                    for i in range(NE):
                        for j in range(NE):
                            if L[a][i, j] != 0 and v[j]:
                                out[i] += w[a] * int(L[a][i, j]) * v[j]
            return out

        if form(x, y) != form(y, x) or form(x, act(y)) != form(y, act(x)):
            return False, {"instance": n}
    return True, {"instances": cfg["samples"]}


def _gauge_def(cfg):
    from .gauge import check_condition_a, check_condition_c, default_gauge
    from . import linalg

    g = default_gauge()
    rng = random.Random(cfg["seed"] + 5)
    ok = check_condition_a(g) and check_condition_c(g)
    for _ in range(cfg["samples"]):
        w = [rng.randint(-3, 3) for _ in range(4)]
        for k in range(4):
            if g.rank(k) and not linalg.is_symmetric(g.symmetric_form(k, w)):
                ok = False
    return ok, {"ranks": list(g.ranks()), "sampled_w": cfg["samples"]}


def _splitting(cfg):
    from .gauge import check_splitting_E, check_splitting_slashed, default_gauge, in_w_plus, witnesses

    g = default_gauge()
    ws = witnesses(cfg["seed"])
    res = [in_w_plus(w) and check_splitting_E(g, w) and check_splitting_slashed(g, w) for w in ws]
    return all(res) and len(ws) == 5, {"witnesses": [[str(c) for c in w] for w in ws], "results": res}


def _contraction(cfg):
    from .gauge import default_gauge
    from .glaoid import x_minkowski
    from .hyperbolic import assemble_symbol, check_contraction_identity, contraction_operator

    g = default_gauge()
    x = x_minkowski()
    res = {}
    for k in range(4):
        res[k] = check_contraction_identity(assemble_symbol(g, x, k), contraction_operator(g, x, k))
    return all(res.values()), {"degrees": res}


def _pos_b(cfg):
    from .gauge import HermForm, build_b, theta0_form
    from . import linalg

    G = theta0_form(build_b(HermForm.identity()))
    minors = linalg.leading_minors(G)
    return all(m > 0 for m in minors), {"size": G.nrows(), "min_minor": min(minors)}


def _pos_a0(cfg):
    from .gauge import default_gauge
    from .glaoid import x_minkowski
    from .hyperbolic import assemble_symbol

    g = default_gauge()
    out = {}
    for k in range(4):
        s = assemble_symbol(g, x_minkowski(), k)
        out[k] = s.is_symmetric() and s.a0_positive()
    return all(out.values()), {"degrees": out}


def _mc_run(gla, x0, cfg, seed):
    from .mc_formal import homology, mc_recursion, mc_residual, random_xi

    H = homology(gla, x0)
    xi = random_xi(H, seed)
    ks = []
    for K in range(1, cfg["mc_order"] + 1):
        sol = mc_recursion(gla, x0, xi, K)  # clauses are assert-checked inside
        ks.append(not mc_residual(gla, sol, K))
    return ks, H


def _mc_synthetic(cfg):
    from .mc_formal import endomorphism_example, rees_example

    out = {}
    ok = True
    for name, ex in (("endo", endomorphism_example), ("rees", rees_example)):
        ks, H = _mc_run(*ex(), cfg, cfg["seed"])
        out[name] = {"H": H.dims, "orders": ks}
        ok = ok and all(ks)
    return ok, out


def _mc_gravity(cfg):
    from .mc_formal import gravity_fiber_example

    ks, H = _mc_run(*gravity_fiber_example(), cfg, cfg["seed"])
    return all(ks), {"H": H.dims, "orders": ks}


def _ricci_case(x, expect: bool):
    from .ricci import bridge

    r = bridge(x)
    flags = {"mc": r.mc_defect_zero, "torsion_zero": r.torsion_zero, "parallel": r.parallel,
             "ricci_zero": r.ricci_zero}
    if expect:
        return all(flags.values()), flags
    return not r.mc_defect_zero and not r.ricci_zero, flags


def _ricci_mink(cfg):
    from .ricci import minkowski_element

    return _ricci_case(minkowski_element(), True)


def _ricci_pp(cfg):
    from .ricci import ppwave_element

    return _ricci_case(ppwave_element("x1^2 - x2^2"), True)


def _ricci_pp_bad(cfg):
    from .ricci import ppwave_element

    return _ricci_case(ppwave_element("x1^2 + x2^2"), False)


def _spinor(cfg):
    from .glaoid import coords, default_ideal
    from .spinor import ideal_via_representation
    from . import linalg

    ideal = default_ideal()
    res, ranks = {}, []
    for k in range(5):
        img = ideal_via_representation(k)
        ranks.append(len(img))
        mine = ideal.rows[k]
        res[k] = linalg.span_equal(img, mine, len(coords(k))) if img and mine else (not img and not mine)
    return all(res.values()), {"ranks": ranks, "span_equal": res}


def _pde_system():
    from .gauge import default_gauge
    from .glaoid import x_minkowski
    from .hyperbolic import assemble_symbol, reduce_1d

    return reduce_1d(assemble_symbol(default_gauge(), x_minkowski(), 1))


def _pde_energy(cfg):
    from .hyperbolic import evolve_linear, plane_wave

    A0, As = _pde_system()
    res = evolve_linear(A0, As, plane_wave(256, A0.shape[0], seed=cfg["seed"]), 1000)
    d = res.relative_drift()
    return d <= 1e-10, {"relative_drift": d, "steps": 1000, "N": 256}


def _pde_convergence(cfg):
    from .hyperbolic import convergence_ratios, manufactured_errors

    A0, As = _pde_system()
    errs = manufactured_errors(A0, As[0], Ns=(64, 128, 256))
    ratios = convergence_ratios(errs)
    return all(abs(r - 4.0) <= 0.3 for r in ratios), {"errors": errs, "ratios": ratios}


def _pde_burgers(cfg):
    from .hyperbolic import burgers_error

    e = burgers_error(N=512)
    return e <= 1e-3, {"max_error": e, "N": 512}


CHECKS = [
    Check("ranks.ideal", 1, "ideal ranks 10,16,6 from the isotypic components", _ranks_ideal),
    Check("ranks.slashed", 1, "filtered rank tables of the slashed modules, kernel total 32", _ranks_slashed),
    Check("ranks.auxiliary", 1, "auxiliary rank table in the proof that f is onto", _ranks_aux),
    Check("ranks.hermitian", 1, "h to b_h has rank 324 = 18^2", _ranks_herm),
    Check("ranks.clifford_group", 1, "the finite Clifford group has 32 elements", _ranks_group),
    Check("identities.jacobi", 2, "graded Jacobi identity of L", _jacobi),
    Check("identities.anchor", 2, "the anchor is a gLa morphism", _anchor),
    Check("identities.ideal_closure", 2, "[L, I] is contained in I", _ideal_closure),
    Check("identities.average", 2, "pi^2 = pi and pi does not depend on the generators", _average),
    Check("identities.gauge_i", 2, "b_h(-, w-) is symmetric (condition (i))", _gauge_i),
    Check("identities.gauge_def", 2, "gauge conditions (a) and (c)", _gauge_def),
    Check("identities.splitting", 2, "E = E_G + w E_G for five rational w in W_+", _splitting),
    Check("identities.contraction", 2, "symbol identity K = p o d o incl", _contraction),
    Check("positivity.b_theta0", 3, "b_h(-, theta_0 -) positive definite for h = 1", _pos_b),
    Check("positivity.A0", 3, "A^0 positive definite at x_mink for k = 0..3", _pos_a0),
    Check("mc.synthetic", 4, "unobstructed MC recursion on synthetic gLas", _mc_synthetic),
    Check("mc.gravity_fiber", 4, "unobstructed MC recursion on the gravity fiber", _mc_gravity),
    Check("ricci.minkowski", 5, "Minkowski element: MC, torsion free, parallel metric, Ricci flat", _ricci_mink),
    Check("ricci.ppwave_harmonic", 5, "harmonic pp-wave: MC and Ricci flat", _ricci_pp),
    Check("ricci.ppwave_nonharmonic", 5, "non-harmonic pp-wave fails MC and Ricci flatness", _ricci_pp_bad),
    Check("spinor.ideal", 6, "I as the kernel of the spinor representation (a computation, not a proof)", _spinor),
    Check("pde.energy", 7, "leapfrog energy conservation", _pde_energy),
    Check("pde.convergence", 7, "second order convergence of a manufactured solution", _pde_convergence),
    Check("pde.burgers", 7, "quasilinear Burgers test against characteristics", _pde_burgers),
]


def select(patterns) -> list[Check]:
    if not patterns:
        return list(CHECKS)
    out = []
    for c in CHECKS:
        for p in patterns:
            if fnmatch.fnmatch(c.name, p) or c.name.startswith(p + "."):
                out.append(c)
                break
    return out


def _run_one(name: str, cfg: dict):
    check = next(c for c in CHECKS if c.name == name)
    t0 = time.perf_counter()
    try:
        ok, witness = check.func(cfg)
    except Exception as exc:  # a crash is a failure with the exception as witness
        ok, witness = False, {"error": f"{type(exc).__name__}: {exc}"}
    return {
        "name": check.name,
        "criterion": check.criterion,
        "reference": check.reference,
        "status": "pass" if ok else "fail",
        "witness": _js(witness),
        "runtime": round(time.perf_counter() - t0, 3),
    }


def run_suite(cfg: dict, only=None) -> dict:
    checks = select(only)
    names = [c.name for c in checks]
    if cfg["jobs"] > 1 and len(names) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(cfg["jobs"]) as pool:
            results = list(pool.map(_run_one, names, [cfg] * len(names)))
    else:
        results = [_run_one(n, cfg) for n in names]
    passed = sum(r["status"] == "pass" for r in results)
    report = {
        "schema_version": SCHEMA_VERSION,
        "seed": cfg["seed"],
        "config": dict(cfg),
        "checks": results,
        "summary": {"passed": passed, "failed": len(results) - passed},
    }
    jsonschema.validate(report, REPORT_SCHEMA)
    return report


def strip_timing(report: dict) -> dict:
    out = json.loads(json.dumps(report))
    for c in out["checks"]:
        c["runtime"] = 0
    return out


def format_table(report: dict) -> str:
    width = max((len(c["name"]) for c in report["checks"]), default=4)
    lines = []
    for c in report["checks"]:
        lines.append(f"{c['status'].upper():4}  [{c['criterion']}] {c['name']:<{width}}  {c['runtime']:7.2f}s  {c['reference']}")
    s = report["summary"]
    lines.append(f"{s['passed']} passed, {s['failed']} failed")
    return "\n".join(lines)
