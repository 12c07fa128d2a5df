# shared small objects; the golden manifests in tests/data were frozen from these
from curvlinf.algebroid import free_tangent_model
from curvlinf.cdga import ground_field
from curvlinf.curvedalg import CurvedStructure
from curvlinf.gradedcore import GradedSpace
from curvlinf.multilinear import SymMultiMap
from curvlinf.samples import base_cdgas


def triple(omega_sign=1):
    # curved dg Lie triple: nabla x = y, nabla y = z, omega = z, [x, y] = y, [x, z] = z
    sp = GradedSpace(["x", "y", "z"], [0, 1, 2], [0, 0, 1])
    ells = {0: SymMultiMap(0, sp, sp, 2, 1, {(): {2: omega_sign}}),
            1: SymMultiMap(1, sp, sp, 1, 0, {(0,): {1: -1}, (1,): {2: -1}}),
            2: SymMultiMap(2, sp, sp, 0, 0, {(0, 1): {1: 1}, (0, 2): {2: 1}})}
    return CurvedStructure("classical", sp, ells, check=False)


def abelian():
    sp = GradedSpace(["a", "b"], [0, 1], [0, 0])
    return CurvedStructure("classical", sp, {})


def dual_tangent():
    return free_tangent_model(base_cdgas()["dual"], weight=-1)


def exterior():
    return base_cdgas()["ext"]


GOLDEN = {
    "triple.json": triple,
    "triple_flipped.json": lambda: triple(-1),
    "abelian.json": abelian,
    "dual_tangent.json": dual_tangent,
    "exterior.json": exterior,
    "ground.json": ground_field,
}
