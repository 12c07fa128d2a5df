"""JSON manifests for every object kind.

A manifest is ``{"format_version", "kind", "bounds", "payload"}``.  Vectors
are name -> "n/d" dicts, linear maps are column dicts keyed by source
names, multilinear maps are lists of ``[[inputs...], vector]`` entries
grouped by arity.  Output is canonical: sorted keys, canonical tuples,
basis order.
"""
import json

import jsonschema

from .cdga import GradedMixedCdga
from .curvedalg import (CurvedStructure, InfinityMorphism, MaurerCartanElement,
                        required_weight)
from .errors import InputError
from .gradedcore import (DeformationRetract, FilteredComplex, GradedMixedComplex,
                         GradedSpace, LinearMap)
from .linalg import qformat, qparse, vaddto
from .modules import FreeModule
from .multilinear import SymMultiMap, canonical, shifted_parities

FORMAT_VERSION = 1
KINDS = ("complex", "graded-mixed-complex", "curved-structure", "cdga", "algebroid",
         "morphism", "retract", "mc-element")

ENVELOPE = {
    "type": "object",
    "required": ["format_version", "kind", "payload"],
    "properties": {
        "format_version": {"const": FORMAT_VERSION},
        "kind": {"enum": list(KINDS)},
        "bounds": {
            "type": "object",
            "properties": {
                "arity": {"type": "integer", "minimum": 0},
                "weight": {"type": "array", "items": {"type": "integer"},
                           "minItems": 2, "maxItems": 2},
                "degree": {"type": "array", "items": {"type": "integer"},
                           "minItems": 2, "maxItems": 2},
            },
            "additionalProperties": False,
        },
        "payload": {"type": "object"},
    },
    "additionalProperties": False,
}


def _ptr(path):
    return "/" + "/".join(str(p).replace("~", "~0").replace("/", "~1") for p in path)


# writing

def _q(c):
    return qformat(c)


def _vec(v, space):
    return {space.basis[i]: _q(c) for i, c in sorted(v.items()) if c}


def _space(sp):
    return [[b, d, w] for b, d, w in zip(sp.basis, sp.degree, sp.weight)]


def _cols(f):
    out = {f.source.basis[j]: _vec(col, f.target) for j, col in sorted(f.cols.items())}
    return out


def _multimap(m):
    return [[[m.source.basis[j] for j in tup], _vec(v, m.target)]
            for tup, v in sorted(m.values.items())]


def _cdga(B):
    sp = B.space
    mult = []
    for (i, j), v in sorted(B.mult.items()):
        if i == B.unit or j == B.unit:
            continue
        mult.append([sp.basis[i], sp.basis[j], _vec(v, sp)])
    return {"space": _space(sp), "unit": sp.basis[B.unit], "mult": mult,
            "d": _cols(B.d), "delta": _cols(B.delta)}


def _algebroid(L):
    if not L.is_free() or L.gen_data is None:
        raise InputError("only algebroids on free modules given by generators can be saved")
    A, M = L.base, L.module
    G = M.generators
    gen_ells, gen_anch = L.gen_data
    ells = {str(n): [[[G.basis[g] for g in U], _vec(v, M.space)]
                     for U, v in sorted(tab.items())]
            for n, tab in sorted(gen_ells.items())}
    anch = {}
    for n, tab in sorted(gen_anch.items()):
        anch[str(n)] = [[[G.basis[g] for g in U],
                         {A.space.basis[i]: _vec(c, A.space) for i, c in sorted(cols.items())}]
                        for U, cols in sorted(tab.items())]
    out = {"base": _cdga(A), "generators": _space(G), "ells": ells, "anchors": anch}
    if L.split is not None:
        T, N = L.split
        out["split"] = {"t": [G.basis[g] for g in T], "n": [G.basis[g] for g in N]}
    if L.theta is not None:
        out["theta"] = G.basis[L.theta]
    return out


def _structure(s):
    out = {"flavor": s.flavor,
           "ells": {str(n): _multimap(m) for n, m in sorted(s.ells.items())}}
    if s.known is not None:
        out["known"] = s.known
    if s.flavor != "classical":
        out["d"] = _cols(s.d)
    if s.base is None:
        out["space"] = _space(s.space)
        return out
    MB = s.module
    layout = getattr(MB, "layout", None)
    if layout is not None:
        G = layout.L_gens
        out["curv"] = {"generators": _space(G),
                       "t": [G.basis[g] for g in layout.t_gens],
                       "n": [G.basis[g] for g in layout.n_gens],
                       "t_algebroid": _algebroid(layout.t_alg),
                       "weight_bound": layout.B.weight_bound}
    else:
        out["over"] = {"base": _cdga(s.base), "generators": _space(MB.generators)}
    return out


def _retract(r):
    return {"big": _complex(r.big), "small": _complex(r.small),
            "i": _cols(r.i), "p": _cols(r.p), "h": _cols(r.h)}


def _complex(c):
    return {"space": _space(c.space), "d": _cols(c.d)}


def _gm_complex(c):
    return {"space": _space(c.space), "d": _cols(c.d),
            "deltas": {str(k): _cols(v) for k, v in sorted(c.deltas.items())}}


def _morphism(phi):
    def side(x):
        if isinstance(x, CurvedStructure):
            return {"kind": "curved-structure", "payload": _structure(x)}
        return {"kind": "algebroid", "payload": _algebroid(x)}
    out = {"source": side(phi.source), "target": side(phi.target),
           "comps": {str(n): _multimap(m) for n, m in sorted(phi.comps.items())}}
    if phi.lin is not None:
        out["lin"] = _cols(phi.lin)
    if phi.known is not None:
        out["known"] = phi.known
    return out


class AlgebroidMorphism:
    """Infinity-morphism between split algebroids, kept with its endpoints."""

    def __init__(self, source, target, phi):
        self.source, self.target, self.phi = source, target, phi

    def __eq__(self, other):
        return (isinstance(other, AlgebroidMorphism) and self.source == other.source
                and self.target == other.target and self.phi.comps == other.phi.comps)


class ChainMap:
    """Degree-0 map between filtered complexes."""

    def __init__(self, source, target, f):
        self.source, self.target, self.f = source, target, f

    def __eq__(self, other):
        return (isinstance(other, ChainMap) and self.source == other.source
                and self.target == other.target and self.f == other.f)


class GMChainMap:
    """Map of graded-mixed complexes given by weight-homogeneous components."""

    def __init__(self, source, target, comps):
        self.source, self.target, self.comps = source, target, comps

    def __eq__(self, other):
        return (isinstance(other, GMChainMap) and self.source == other.source
                and self.target == other.target and self.comps == other.comps)


def kind_of(obj):
    from .algebroid import Algebroid
    if isinstance(obj, FilteredComplex):
        return "complex"
    if isinstance(obj, GradedMixedComplex):
        return "graded-mixed-complex"
    if isinstance(obj, CurvedStructure):
        return "curved-structure"
    if isinstance(obj, GradedMixedCdga):
        return "cdga"
    if isinstance(obj, Algebroid):
        return "algebroid"
    if isinstance(obj, (InfinityMorphism, AlgebroidMorphism, ChainMap, GMChainMap)):
        return "morphism"
    if isinstance(obj, DeformationRetract):
        return "retract"
    if isinstance(obj, MaurerCartanElement):
        return "mc-element"
    raise InputError("cannot serialize %s" % type(obj).__name__)


def to_payload(obj):
    kind = kind_of(obj)
    if kind == "complex":
        return _complex(obj)
    if kind == "graded-mixed-complex":
        return _gm_complex(obj)
    if kind == "curved-structure":
        return _structure(obj)
    if kind == "cdga":
        return _cdga(obj)
    if kind == "algebroid":
        return _algebroid(obj)
    if kind == "retract":
        return _retract(obj)
    if kind == "mc-element":
        return {"structure": {"kind": "curved-structure", "payload": _structure(obj.target)},
                "x": _vec(obj.x, obj.target.space)}
    if isinstance(obj, AlgebroidMorphism):
        out = _morphism(obj.phi)
        out["source"] = {"kind": "algebroid", "payload": _algebroid(obj.source)}
        out["target"] = {"kind": "algebroid", "payload": _algebroid(obj.target)}
        return out
    if isinstance(obj, ChainMap):
        return {"source": {"kind": "complex", "payload": _complex(obj.source)},
                "target": {"kind": "complex", "payload": _complex(obj.target)},
                "lin": _cols(obj.f)}
    if isinstance(obj, GMChainMap):
        return {"source": {"kind": "graded-mixed-complex", "payload": _gm_complex(obj.source)},
                "target": {"kind": "graded-mixed-complex", "payload": _gm_complex(obj.target)},
                "components": {str(k): _cols(f) for k, f in sorted(obj.comps.items())}}
    return _morphism(obj)


def _bounds(obj):
    sp = None
    arity = None
    if isinstance(obj, CurvedStructure):
        sp = obj.space
        arity = max(obj.ells, default=0)
    elif isinstance(obj, (FilteredComplex, GradedMixedComplex, GradedMixedCdga)):
        sp = obj.space
    elif isinstance(obj, DeformationRetract):
        sp = obj.big.space
    if sp is None or not sp.dim:
        return {} if arity is None else {"arity": arity}
    out = {"weight": [min(sp.weight), max(sp.weight)],
           "degree": [min(sp.degree), max(sp.degree)]}
    if arity is not None:
        out["arity"] = arity
    return out


def dump_manifest(obj):
    return {"format_version": FORMAT_VERSION, "kind": kind_of(obj),
            "bounds": _bounds(obj), "payload": to_payload(obj)}


def dumps(obj):
    return json.dumps(dump_manifest(obj), sort_keys=True, indent=1,
                      ensure_ascii=False) + "\n"


def save(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))


# reading

class _Reader:
    def __init__(self, strict=True):
        self.path = []
        self.strict = strict

    def err(self, msg, *extra):
        raise InputError(msg, _ptr(self.path + list(extra)))

    def get(self, obj, key, typ=None, default=KeyError):
        if not isinstance(obj, dict):
            self.err("expected an object")
        if key not in obj:
            if default is KeyError:
                self.err("missing key %r" % key)
            return default
        v = obj[key]
        if typ is not None and not isinstance(v, typ):
            self.err("expected %s" % (typ.__name__ if isinstance(typ, type) else "value"), key)
        return v

    def enter(self, *keys):
        self.path.extend(keys)

    def leave(self, n=1):
        del self.path[len(self.path) - n:]

    def scalar(self, c, *key):
        if isinstance(c, bool) or not isinstance(c, (int, str)):
            self.err("malformed rational %r" % (c,), *key)
        try:
            return qparse(c)
        except (ValueError, ZeroDivisionError):
            self.err("malformed rational %r" % (c,), *key)

    def index(self, space, name, *key):
        if not isinstance(name, str) or name not in space:
            self.err("undeclared basis symbol %r" % (name,), *key)
        return space.index(name)

    def space(self, data, key):
        self.enter(key)
        if not isinstance(data, list):
            self.err("expected a list of [name, degree, weight]")
        for k, t in enumerate(data):
            if (not isinstance(t, list) or len(t) != 3 or not isinstance(t[0], str)
                    or not all(isinstance(x, int) and not isinstance(x, bool) for x in t[1:])):
                self.err("expected [name, degree, weight]", k)
        try:
            sp = GradedSpace.from_triples(data)
        except InputError as e:
            self.err(str(e))
        self.leave()
        return sp

    def vec(self, data, space, *key):
        self.enter(*key)
        if not isinstance(data, dict):
            self.err("expected a vector object")
        out = {}
        for name, c in data.items():
            i = self.index(space, name, name)
            c = self.scalar(c, name)
            if c:
                out[i] = c
        self.leave(len(key))
        return out

    def cols(self, data, src, tgt, shift, key, min_weight=0):
        self.enter(key)
        if not isinstance(data, dict):
            self.err("expected a column object")
        cols = {}
        for name, col in data.items():
            j = self.index(src, name, name)
            cols[j] = self.vec(col, tgt, name)
        self.leave()
        try:
            f = LinearMap(src, tgt, shift, -10 ** 6, cols)
        except InputError as e:
            self.err(str(e), key)
        w = f.actual_min_weight()
        if w is not None and w < min_weight:
            self.err("map lowers weight below %d" % min_weight, key)
        return f.with_min_weight(min_weight)

    def multimap(self, data, n, src, tgt, shift, min_weight, key):
        self.enter(key)
        if not isinstance(data, list):
            self.err("expected a list of [[inputs], vector] entries")
        par = shifted_parities(src)
        vals = {}
        for k, ent in enumerate(data):
            if not isinstance(ent, list) or len(ent) != 2 or not isinstance(ent[0], list):
                self.err("expected [[inputs], vector]", k)
            if len(ent[0]) != n:
                self.err("entry has arity %d, expected %d" % (len(ent[0]), n), k)
            tup = tuple(self.index(src, x, k, 0, t) for t, x in enumerate(ent[0]))
            v = self.vec(ent[1], tgt, k, 1)
            sign, srt = canonical(tup, par)
            if not sign:
                if v:
                    self.err("value on a tuple with a repeated odd entry", k)
                continue
            vaddto(vals.setdefault(srt, {}), v, sign)
        self.leave()
        try:
            m = SymMultiMap(n, src, tgt, shift, min_weight, vals)
        except InputError as e:
            self.err(str(e), key)
        return m

    def arity_key(self, key):
        try:
            n = int(key)
        except ValueError:
            self.err("arity keys must be integers", key)
        if n < 0 or str(n) != key:
            self.err("arity keys must be nonnegative integers", key)
        return n

    # kinds

    def cdga(self, d):
        sp = self.space(self.get(d, "space"), "space")
        unit = self.index(sp, self.get(d, "unit", str), "unit")
        mult = {}
        self.enter("mult")
        for k, ent in enumerate(self.get(d, "mult", list, [])):
            if not isinstance(ent, list) or len(ent) != 3:
                self.err("expected [a, b, vector]", k)
            i = self.index(sp, ent[0], k, 0)
            j = self.index(sp, ent[1], k, 1)
            mult[(i, j)] = self.vec(ent[2], sp, k, 2)
        self.leave()
        dd = self.cols(self.get(d, "d", dict, {}), sp, sp, 1, "d")
        delta = self.cols(self.get(d, "delta", dict, {}), sp, sp, 1, "delta", 1)
        try:
            return GradedMixedCdga(sp, unit, mult, dd, delta)
        except InputError as e:
            self.err(str(e))

    def complex(self, d):
        sp = self.space(self.get(d, "space"), "space")
        dd = self.cols(self.get(d, "d", dict, {}), sp, sp, 1, "d")
        try:
            return FilteredComplex(sp, dd, check=self.strict)
        except InputError as e:
            self.err(str(e), "d")

    def gm_complex(self, d):
        sp = self.space(self.get(d, "space"), "space")
        dd = self.cols(self.get(d, "d", dict, {}), sp, sp, 1, "d")
        deltas = {}
        self.enter("deltas")
        for key, cols in self.get(d, "deltas", dict, {}).items():
            k = self.arity_key(key)
            if k < 1:
                self.err("delta index must be >= 1", key)
            deltas[k] = self.cols(cols, sp, sp, 1, key, k)
        self.leave()
        try:
            return GradedMixedComplex(sp, dd, deltas, check=self.strict)
        except InputError as e:
            self.err(str(e))

    def algebroid(self, d):
        from .algebroid import algebroid_from_generators
        self.enter("base")
        A = self.cdga(self.get(d, "base", dict))
        self.leave()
        G = self.space(self.get(d, "generators"), "generators")
        M = FreeModule(A, G)
        gpar = shifted_parities(G)
        ells, anch = {}, {}
        for key, tab, store in (("ells", ells, "vec"), ("anchors", anch, "der")):
            self.enter(key)
            for nk, ents in self.get(d, key, dict, {}).items():
                n = self.arity_key(nk)
                self.enter(nk)
                if not isinstance(ents, list):
                    self.err("expected a list of entries")
                for k, ent in enumerate(ents):
                    if not isinstance(ent, list) or len(ent) != 2 or not isinstance(ent[0], list):
                        self.err("expected [[generators], value]", k)
                    if len(ent[0]) != n:
                        self.err("entry has arity %d, expected %d" % (len(ent[0]), n), k)
                    U = tuple(self.index(G, x, k, 0, t) for t, x in enumerate(ent[0]))
                    sign, srt = canonical(U, gpar)
                    if not sign:
                        self.err("repeated odd generator", k)
                    if store == "vec":
                        v = self.vec(ent[1], M.space, k, 1)
                        vaddto(tab.setdefault(n, {}).setdefault(srt, {}), v, sign)
                    else:
                        if not isinstance(ent[1], dict):
                            self.err("expected a derivation column object", k, 1)
                        cols = {}
                        for name, col in ent[1].items():
                            i = self.index(A.space, name, k, 1, name)
                            v = self.vec(col, A.space, k, 1, name)
                            if v:
                                cols[i] = {o: sign * c for o, c in v.items()}
                        tab.setdefault(n, {})[srt] = cols
                self.leave()
            self.leave()
        split = None
        if "split" in d:
            s = self.get(d, "split", dict)
            self.enter("split")
            T = [self.index(G, x, "t", k) for k, x in enumerate(self.get(s, "t", list))]
            N = [self.index(G, x, "n", k) for k, x in enumerate(self.get(s, "n", list))]
            self.leave()
            split = (T, N)
        theta = None
        if "theta" in d:
            theta = self.index(G, self.get(d, "theta", str), "theta")
        try:
            return algebroid_from_generators(A, G, ells, anch, split=split, theta=theta)
        except InputError as e:
            self.err(str(e))

    def structure(self, d):
        flavor = self.get(d, "flavor", str)
        if flavor not in ("classical", "mixed", "graded-mixed"):
            self.err("unknown flavor %r" % flavor, "flavor")
        base = module = None
        if "curv" in d:
            base, module = self._curv_layout(self.get(d, "curv", dict))
            sp = module.space
        elif "over" in d:
            o = self.get(d, "over", dict)
            self.enter("over", "base")
            base = self.cdga(self.get(o, "base", dict))
            self.leave(2)
            self.enter("over")
            G = self.space(self.get(o, "generators"), "generators")
            self.leave()
            module = FreeModule(base, G)
            sp = module.space
        else:
            sp = self.space(self.get(d, "space"), "space")
        ells = {}
        self.enter("ells")
        for key, ents in self.get(d, "ells", dict, {}).items():
            n = self.arity_key(key)
            ells[n] = self.multimap(ents, n, sp, sp, 2 - n, required_weight(flavor, n), key)
        self.leave()
        dd = None
        if flavor != "classical":
            dd = self.cols(self.get(d, "d", dict, {}), sp, sp, 1, "d")
        elif "d" in d:
            self.err("classical structures carry no separate d", "d")
        known = self.get(d, "known", int, None)
        try:
            return CurvedStructure(flavor, sp, ells, d=dd, known=known, base=base,
                                   module=module)
        except InputError as e:
            self.err(str(e))

    def _curv_layout(self, c):
        from .algebroid import CurvLayout, chevalley_eilenberg
        self.enter("curv")
        G = self.space(self.get(c, "generators"), "generators")
        T = [self.index(G, x, "t", k) for k, x in enumerate(self.get(c, "t", list))]
        N = [self.index(G, x, "n", k) for k, x in enumerate(self.get(c, "n", list))]
        W = self.get(c, "weight_bound", int)
        self.enter("t_algebroid")
        talg = self.algebroid(self.get(c, "t_algebroid", dict))
        self.leave()
        self.leave()
        B = chevalley_eilenberg(talg, weight_bound=W)
        Nsp = GradedSpace([G.basis[g] for g in N], [G.degree[g] for g in N], [0] * len(N))
        MB = FreeModule(B, Nsp)
        MB.layout = CurvLayout(G, T, N, talg, B)
        return B, MB

    def side(self, d, key):
        self.enter(key)
        kind = self.get(d, "kind", str)
        self.enter("payload")
        p = self.get(d, "payload", dict)
        if kind == "curved-structure":
            out = self.structure(p)
        elif kind == "algebroid":
            out = self.algebroid(p)
        elif kind == "complex":
            out = self.complex(p)
        elif kind == "graded-mixed-complex":
            out = self.gm_complex(p)
        else:
            self.err("unsupported morphism endpoint %r" % kind)
        self.leave(2)
        return kind, out

    def morphism(self, d):
        ks, src = self.side(self.get(d, "source", dict), "source")
        kt, tgt = self.side(self.get(d, "target", dict), "target")
        if ks != kt:
            self.err("source and target kinds differ", "target")
        if ks == "complex":
            f = self.cols(self.get(d, "lin", dict, {}), src.space, tgt.space, 0, "lin")
            return ChainMap(src, tgt, f)
        if ks == "graded-mixed-complex":
            comps = {}
            self.enter("components")
            for key, cols in self.get(d, "components", dict, {}).items():
                k = self.arity_key(key)
                comps[k] = self.cols(cols, src.space, tgt.space, 0, key, k)
                if any(w != k for w in comps[k].weight_components()):
                    self.err("component %d must have weight exactly %d" % (k, k), key)
            self.leave()
            return GMChainMap(src, tgt, comps)
        g = src if ks == "curved-structure" else src.structure
        h = tgt if ks == "curved-structure" else tgt.structure
        comps = {}
        self.enter("comps")
        for key, ents in self.get(d, "comps", dict, {}).items():
            n = self.arity_key(key)
            req = 1 if n == 0 or (n == 1 and g.flavor != "classical") else 0
            comps[n] = self.multimap(ents, n, g.space, h.space, 1 - n, req, key)
        self.leave()
        lin = None
        if "lin" in d:
            lin = self.cols(self.get(d, "lin", dict), g.space, h.space, 0, "lin")
        known = self.get(d, "known", int, None)
        try:
            phi = InfinityMorphism(g, h, comps, lin=lin, known=known)
        except InputError as e:
            self.err(str(e))
        if ks == "algebroid":
            return AlgebroidMorphism(src, tgt, phi)
        return phi

    def retract(self, d):
        self.enter("big")
        big = self.complex(self.get(d, "big", dict))
        self.leave()
        self.enter("small")
        small = self.complex(self.get(d, "small", dict))
        self.leave()
        W, V = big.space, small.space
        i = self.cols(self.get(d, "i", dict, {}), V, W, 0, "i")
        p = self.cols(self.get(d, "p", dict, {}), W, V, 0, "p")
        h = self.cols(self.get(d, "h", dict, {}), W, W, -1, "h")
        try:
            return DeformationRetract(big, small, i, p, h, check=self.strict)
        except InputError as e:
            self.err(str(e))

    def mc(self, d):
        kind, s = self.side(self.get(d, "structure", dict), "structure")
        if kind != "curved-structure":
            self.err("expected a curved structure", "structure")
        x = self.vec(self.get(d, "x", dict), s.space, "x")
        try:
            return MaurerCartanElement(s, x)
        except InputError as e:
            self.err(str(e), "x")


def _check_bounds(obj, bounds):
    if not bounds:
        return
    sp = None
    if isinstance(obj, (CurvedStructure, FilteredComplex, GradedMixedComplex,
                        GradedMixedCdga)):
        sp = obj.space
    elif isinstance(obj, DeformationRetract):
        sp = obj.big.space
    if sp is not None and sp.dim:
        for key, vals in (("weight", sp.weight), ("degree", sp.degree)):
            if key in bounds:
                lo, hi = bounds[key]
                if min(vals) < lo or max(vals) > hi:
                    raise InputError("%s outside the declared span" % key, "/bounds/" + key)
    if "arity" in bounds and isinstance(obj, CurvedStructure):
        if max(obj.ells, default=0) > bounds["arity"]:
            raise InputError("operation beyond the declared arity", "/bounds/arity")


def from_manifest(data, strict=True):
    """Typed object from a parsed manifest.  ``strict=False`` skips the
    constructor checks of complexes and retracts, leaving them to
    validation."""
    errors = sorted(jsonschema.Draft7Validator(ENVELOPE).iter_errors(data),
                    key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise InputError("schema violation: %s" % e.message, _ptr(e.absolute_path))
    r = _Reader(strict)
    r.enter("payload")
    p = data["payload"]
    kind = data["kind"]
    obj = {"complex": r.complex, "graded-mixed-complex": r.gm_complex,
           "curved-structure": r.structure, "cdga": r.cdga, "algebroid": r.algebroid,
           "morphism": r.morphism, "retract": r.retract, "mc-element": r.mc}[kind](p)
    _check_bounds(obj, data.get("bounds", {}))
    return obj


def loads(text, strict=True):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError("invalid JSON: %s" % e.msg, "line %d" % e.lineno)
    return from_manifest(data, strict)


def load(path, strict=True):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise InputError("cannot read %s: %s" % (path, e.strerror))
    return loads(text, strict)
