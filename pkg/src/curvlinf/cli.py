"""Command line front end.

Each command reads manifests, runs one operation and prints a JSON report
on stdout (with the result manifest inline unless ``-o`` is given) and a
one-line summary on stderr.  Exit codes: 0 ok, 1 a check failed, 2 bad
input, 3 a resource bound was hit.
"""
import argparse
import json
import os
import sys

from . import algebroid as alg
from . import curvedalg as ca
from . import gradedcore as gc
from . import operadcheck as oc
from .cdga import GradedMixedCdga, check_cdga
from .errors import InputError, ResourceError
from .serialize import (AlgebroidMorphism, ChainMap, GMChainMap, dump_manifest, load,
                        save)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3


class Outcome:
    def __init__(self, ok=True, failure=None, details=None, result=None, extra=None):
        self.ok = ok
        self.failure = failure          # (relation, arity, tuple)
        self.details = details or {}
        self.result = result
        self.extra = extra or {}        # name -> object for --*-out files


def _from_report(rep, details=None):
    first = rep.first() if not rep.ok else None
    d = {"checked_up_to": rep.checked_up_to, "complete": rep.complete}
    d.update(details or {})
    return Outcome(rep.ok, first, d)


def _expect(obj, types, what):
    if not isinstance(obj, types):
        raise InputError("expected %s" % what)
    return obj


def _jobs():
    raw = os.environ.get("CURVLINF_JOBS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise InputError("CURVLINF_JOBS must be a positive integer")
    if n < 1:
        raise InputError("CURVLINF_JOBS must be a positive integer")
    return n


# commands

def cmd_validate(args):
    obj = load(args.input, strict=False)
    if isinstance(obj, gc.FilteredComplex):
        ok = (obj.d @ obj.d).is_zero()
        return Outcome(ok, None if ok else ("d squared", 1, ()))
    if isinstance(obj, gc.GradedMixedComplex):
        k = obj.failing_relation()
        return Outcome(k is None, None if k is None else ("weight %d relation" % k, None, ()))
    if isinstance(obj, ca.CurvedStructure):
        return _from_report(ca.check_structure(obj, arity_bound=args.arity_bound))
    if isinstance(obj, alg.Algebroid):
        return _from_report(alg.check_algebroid(obj, arity_bound=args.arity_bound))
    if isinstance(obj, GradedMixedCdga):
        rep = check_cdga(obj)
        first = rep.first()
        return Outcome(rep.ok, None if first is None else (first[0], None, first[1]))
    if isinstance(obj, gc.DeformationRetract):
        bad = obj.failing_identities(side=args.side_conditions)
        return Outcome(not bad, (bad[0], None, ()) if bad else None,
                       {"failing": bad})
    if isinstance(obj, ca.MaurerCartanElement):
        raise InputError("use mc-check for Maurer-Cartan elements")
    raise InputError("use check-morphism for morphisms")


def cmd_check_morphism(args):
    obj = load(args.input)
    if isinstance(obj, AlgebroidMorphism):
        return _from_report(alg.check_algebroid_morphism(obj.phi, obj.source, obj.target,
                                                         arity_bound=args.arity_bound))
    if isinstance(obj, ca.InfinityMorphism):
        kw = {} if args.arity_bound is None else {"arity_bound": args.arity_bound}
        return _from_report(ca.check_infinity_morphism(obj, **kw))
    if isinstance(obj, GMChainMap):
        ok, k = gc.check_gm_infinity_morphism(obj.comps, obj.source, obj.target)
        return Outcome(ok, None if ok else ("weight %d relation" % k, None, ()))
    f = obj.f
    if not (obj.target.d @ f - f @ obj.source.d).is_zero():
        return Outcome(False, ("chain map", 1, ()))
    if args.predicate == "admissible":
        rep = gc.is_admissible_mono(f, obj.source, obj.target)
        wit = {k: str(v) for k, v in rep.witness.items()}
        return Outcome(rep.ok, None if rep.ok else ("admissible mono", None, tuple(wit)),
                       {"weight": rep.weight, "witness": wit})
    if args.predicate == "quasi-iso":
        rep = gc.is_graded_quasi_iso(f, obj.source, obj.target)
        per = {str(w): {"cone_acyclic": v["cone_acyclic"]} for w, v in rep.per_weight.items()}
        bad = [w for w, v in sorted(rep.per_weight.items()) if not v["cone_acyclic"]]
        return Outcome(rep.ok, None if rep.ok else ("graded quasi-iso", None, ("weight %d" % bad[0],) if bad else ()),
                       {"per_weight": per})
    return Outcome(True)


def cmd_compose(args):
    psi, phi = load(args.second), load(args.first)
    if isinstance(psi, AlgebroidMorphism) and isinstance(phi, AlgebroidMorphism):
        if phi.target != psi.source:
            raise InputError("target of the first morphism is not the source of the second")
        c = alg.compose_algebroid_morphisms(psi.phi, phi.phi, arity_bound=args.arity_bound)
        return Outcome(result=AlgebroidMorphism(phi.source, psi.target, c))
    _expect(psi, ca.InfinityMorphism, "infinity-morphisms")
    _expect(phi, ca.InfinityMorphism, "infinity-morphisms")
    kw = {} if args.arity_bound is None else {"arity_bound": args.arity_bound}
    return Outcome(result=ca.compose_infinity_morphisms(psi, phi, **kw))


def cmd_transfer(args):
    s = _expect(load(args.structure), ca.CurvedStructure, "a curved structure")
    r = _expect(load(args.retract), gc.DeformationRetract, "a deformation retract")
    kw = {} if args.arity_bound is None else {"arity_bound": args.arity_bound}
    t, ioo = ca.homotopy_transfer(s, r, **kw)
    details = {"known": t.known}
    out = Outcome(result=t, details=details, extra={"inclusion": ioo})
    if args.verify:
        rep = ca.check_structure(t)
        rep2 = ca.check_infinity_morphism(ioo)
        details["structure_ok"] = rep.ok
        details["inclusion_ok"] = rep2.ok
        out.ok = rep.ok and rep2.ok
        out.failure = rep.first() or rep2.first()
    return out


def cmd_minimal_model(args):
    c = _expect(load(args.input), gc.FilteredComplex, "a filtered complex")
    small, r = gc.minimal_model(c)
    dims = gc.space_dims(small.space)
    return Outcome(result=r, details={"dims": {"%d,%d" % k: v for k, v in sorted(dims.items())}})


def cmd_blend(args):
    obj = load(args.input)
    if isinstance(obj, ca.InfinityMorphism):
        return Outcome(result=ca.blend_morphism(obj))
    return Outcome(result=ca.blend(_expect(obj, ca.CurvedStructure, "a curved structure")))


def cmd_unblend(args):
    s = _expect(load(args.input), ca.CurvedStructure, "a curved structure")
    return Outcome(result=ca.unblend(s))


def cmd_tot(args):
    obj = load(args.input)
    if isinstance(obj, gc.GradedMixedComplex):
        return Outcome(result=gc.tot(obj))
    return Outcome(result=ca.tot_structure(_expect(obj, ca.CurvedStructure,
                                                   "a structure or graded-mixed complex")))


def cmd_split(args):
    obj = load(args.input)
    if isinstance(obj, gc.FilteredComplex):
        return Outcome(result=gc.split(obj))
    return Outcome(result=ca.split_structure(_expect(obj, ca.CurvedStructure,
                                                     "a structure or filtered complex")))


def cmd_ce(args):
    L = _expect(load(args.input), alg.Algebroid, "an algebroid")
    B = alg.chevalley_eilenberg(L, weight_bound=args.weight_bound,
                                arity_bound=args.arity_bound)
    plain = GradedMixedCdga(B.space, B.unit, B.mult, B.d, B.delta, check=False)
    ok = B.d_squared_zero
    return Outcome(ok, None if ok else ("d_CE squared", None, ()),
                   {"dim": B.space.dim, "d_squared_zero": ok,
                    "arity_bound": B.arity_bound, "weight_bound": B.weight_bound},
                   result=plain)


def cmd_rees(args):
    return Outcome(result=alg.rees(_expect(load(args.input), alg.Algebroid, "an algebroid")))


def cmd_unrees(args):
    return Outcome(result=alg.unrees(_expect(load(args.input), alg.Algebroid, "an algebroid")))


def cmd_curv(args):
    L = _expect(load(args.input), alg.Algebroid, "an algebroid")
    g = alg.curv(L, weight_bound=args.weight_bound)
    return Outcome(result=g, details={"weight_bound": g.base.weight_bound,
                                      "base_dim": g.base.space.dim})


def cmd_uncurv(args):
    g = _expect(load(args.input), ca.CurvedStructure, "a curved structure")
    return Outcome(result=alg.uncurv(g))


def cmd_curv_morphism(args):
    m = _expect(load(args.input), AlgebroidMorphism, "a morphism of algebroids")
    gL = alg.curv(m.source, weight_bound=args.weight_bound)
    gH = alg.curv(m.target, weight_bound=gL.base.weight_bound)
    return Outcome(result=alg.curv_morphism(m.phi, m.source, m.target, gL, gH))


def cmd_mc_check(args):
    m = _expect(load(args.input), ca.MaurerCartanElement, "a Maurer-Cartan element")
    curv = ca.curvature_at(m.target, m.x)
    sp = m.target.space
    ok = not curv
    details = {"curvature": {sp.basis[i]: str(c) for i, c in sorted(curv.items())}}
    out = Outcome(ok, None if ok else ("Maurer-Cartan", 0, tuple(sp.basis[i] for i in sorted(curv))),
                  details)
    if args.twist_out:
        out.extra["twist"] = ca.twist(m.target, m.x)
    if args.morphism_out:
        out.extra["morphism"] = ca.mc_to_morphism(m)
    return out


def cmd_tangent(args):
    A = _expect(load(args.input), GradedMixedCdga, "a cdga")
    T = alg.compute_tangent(A)
    F = alg.free_tangent_model(A, weight=args.weight)
    degs = {}
    for e in T.space.degree:
        degs[str(e)] = degs.get(str(e), 0) + 1
    rep = alg.check_algebroid(F)
    return Outcome(rep.ok, rep.first(), {"tangent_dims": degs,
                                         "derivations": [T.space.basis[i] for i in range(T.space.dim)],
                                         "free_model_rank": F.module.generators.dim},
                   result=F)


def cmd_filtration(args):
    L = _expect(load(args.input), alg.Algebroid, "an algebroid")
    kernel = args.kernel.split(",") if args.kernel else None
    return Outcome(result=alg.apply_filtration(L, args.kind, kernel))


def cmd_selftest_operad(args):
    rep = oc.check_d_squared(args.arity, args.weight)
    printed = {str(n): oc.reproduces_printed(n)[0] for n in (0, 1, 2)}
    desc, dimJ = oc.check_descends(args.arity, args.weight)
    ok = rep.ok and all(printed.values()) and desc
    failure = None
    if not rep.ok:
        conv, flavor, t, _ = rep.residues[0]
        failure = ("d squared (%s, %s)" % (conv, flavor), oc.arity(t), oc.format_tree(t))
    elif not all(printed.values()):
        n = min(k for k, v in printed.items() if not v)
        failure = ("printed identity n=%s" % n, int(n), ())
    elif not desc:
        failure = ("descends to cLie", None, ())
    print("selftest-operad: %d elements in %.2fs" % (rep.checked, rep.seconds), file=sys.stderr)
    return Outcome(ok, failure, {"checked": rep.checked, "printed": printed,
                                 "descends": desc, "ideal_dim": dimJ})


def cmd_image_check(args):
    g = _expect(load(args.input), ca.CurvedStructure, "a curved structure")
    if g.module is None:
        raise InputError("the structure must live over a base cdga")
    ok = alg.check_weight_zero_generation(g)
    return Outcome(ok, None if ok else ("weight-zero generation", None, ()))


COMMANDS = {
    "validate": cmd_validate, "check-morphism": cmd_check_morphism, "compose": cmd_compose,
    "transfer": cmd_transfer, "minimal-model": cmd_minimal_model, "blend": cmd_blend,
    "unblend": cmd_unblend, "tot": cmd_tot, "split": cmd_split, "ce": cmd_ce,
    "rees": cmd_rees, "unrees": cmd_unrees, "curv": cmd_curv, "uncurv": cmd_uncurv,
    "curv-morphism": cmd_curv_morphism, "mc-check": cmd_mc_check, "tangent": cmd_tangent,
    "filtration": cmd_filtration, "selftest-operad": cmd_selftest_operad,
    "image-check": cmd_image_check,
}


def build_parser():
    p = argparse.ArgumentParser(prog="curvlinf",
                                description="Curved L-infinity structures and algebroids.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, *inputs, out=True, **kw):
        sp = sub.add_parser(name, **kw)
        for i in inputs:
            sp.add_argument(i)
        if out:
            sp.add_argument("-o", "--output", help="write the result manifest here")
        return sp

    sp = add("validate", "input", out=False, help="check the axioms of an object")
    sp.add_argument("--arity-bound", type=int)
    sp.add_argument("--side-conditions", action="store_true",
                    help="also require p h = 0, h i = 0, h h = 0 for retracts")
    sp = add("check-morphism", "input", out=False, help="check a morphism")
    sp.add_argument("--arity-bound", type=int)
    sp.add_argument("--predicate", choices=["chain", "admissible", "quasi-iso"],
                    default="chain")
    sp = add("compose", "first", "second", help="second o first")
    sp.add_argument("--arity-bound", type=int)
    sp = add("transfer", "structure", "retract", help="homotopy transfer")
    sp.add_argument("--arity-bound", type=int)
    sp.add_argument("--inclusion-out", help="write the infinity-inclusion here")
    sp.add_argument("--verify", action="store_true")
    add("minimal-model", "input", help="minimal model retract of a filtered complex")
    add("blend", "input")
    add("unblend", "input")
    add("tot", "input")
    add("split", "input")
    sp = add("ce", "input", help="Chevalley-Eilenberg algebra")
    sp.add_argument("--weight-bound", type=int)
    sp.add_argument("--arity-bound", type=int)
    add("rees", "input")
    add("unrees", "input")
    sp = add("curv", "input")
    sp.add_argument("--weight-bound", type=int)
    add("uncurv", "input")
    sp = add("curv-morphism", "input")
    sp.add_argument("--weight-bound", type=int)
    sp = add("mc-check", "input", out=False)
    sp.add_argument("--twist-out")
    sp.add_argument("--morphism-out")
    sp = add("tangent", "input", help="free model of the tangent algebroid")
    sp.add_argument("--weight", type=int, default=0)
    sp = add("filtration", "input")
    sp.add_argument("--kind", choices=["trivial", "hodge", "anchor"], required=True)
    sp.add_argument("--kernel", help="comma separated generators spanning ker R")
    sp = add("selftest-operad", out=False)
    sp.add_argument("--arity", type=int, default=4)
    sp.add_argument("--weight", type=int, default=4)
    add("image-check", "input", out=False)
    return p


def _tuple_json(t):
    if isinstance(t, (tuple, list)):
        return [str(x) for x in t]
    return str(t)


def run(argv=None):
    """Returns (exit code, stdout text, stderr text)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    report = {"command": args.command}
    try:
        _jobs()
        out = COMMANDS[args.command](args)
    except InputError as e:
        report.update(ok=False, error={"kind": "input", "message": str(e)})
        return EXIT_INPUT, _dump(report), "input error: %s\n" % e
    except ResourceError as e:
        report.update(ok=False, error={"kind": "resource", "message": str(e)})
        return EXIT_RESOURCE, _dump(report), "resource bound: %s\n" % e
    report["ok"] = out.ok
    if out.failure is not None:
        rel, ar, where = out.failure
        report["failure"] = {"relation": str(rel), "arity": ar, "tuple": _tuple_json(where)}
    if out.details:
        report["details"] = out.details
    if out.result is not None:
        if getattr(args, "output", None):
            save(out.result, args.output)
            report["output"] = args.output
        else:
            report["result"] = dump_manifest(out.result)
    for name, obj in out.extra.items():
        path = getattr(args, name + "_out", None)
        if path:
            save(obj, path)
    if out.ok:
        err = "%s: ok\n" % args.command
    else:
        f = report.get("failure", {})
        err = "%s: failed: %s (arity %s) at %s\n" % (args.command, f.get("relation"),
                                                   f.get("arity"), f.get("tuple"))
    return (EXIT_OK if out.ok else EXIT_FAIL), _dump(report), err


def _dump(report):
    return json.dumps(report, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def main(argv=None):
    code, out, err = run(argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
