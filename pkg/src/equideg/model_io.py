"""Model configuration, assembly, and report generation.

A model is described by a JSON config: the finite symmetry group and its
action on the membrane coordinates, the linearization a*I + zeta(alpha)*C,
a Bessel-table horizon, and the analysis options.  Assembly validates the
coupling (symmetry, equivariance, scalar isotypic blocks, monotone curves),
builds the ambient Burnside context, and exposes the full pipeline.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import bifurcation as bif
from .burnside import BurnsideElement
from .errors import (
    ComputationError,
    CrossCheckMismatch,
    EquivarianceViolation,
    NonMonotoneCurve,
    NonScalarIsotypicBlock,
    SchemaError,
)
from .groups import CharacterTable, FiniteGroup, OrthogonalAction, Permutation, group_from_generators
from .naming import s4z2_class_names
from .orbit_types import AmbientContext, fixed_space, fold, maximal_types, parse_symbol
from .reps import IsotypicComponent, antipodal_product, irreps_with_antipodal, isotypic_components
from .spectrum import (
    BesselZeroTable,
    CriticalPoint,
    EigenvalueCurve,
    KernelMode,
    critical_points,
    kernel_mode,
)


def _require(cond: bool, msg: str):
    if not cond:
        raise SchemaError(msg)


@dataclass
class Model:
    name: str
    config: dict
    gamma: FiniteGroup
    gamma_prime: FiniteGroup
    action: OrthogonalAction
    table: Optional[CharacterTable]
    components: list[IsotypicComponent]
    ctx: AmbientContext
    a: float
    coupling: np.ndarray
    weights: dict[int, float]
    curves: list[EigenvalueCurve]
    bessel: BesselZeroTable
    critical: list[CriticalPoint]
    problem: bif.BifurcationProblem

    def component(self, j: int) -> IsotypicComponent:
        for c in self.components:
            if c.j == j:
                return c
        raise KeyError(f"no isotypic component labelled {j}")

    def critical_by_id(self, cid) -> CriticalPoint:
        cid = tuple(cid)
        for cp in self.critical:
            if cp.id == cid:
                return cp
        raise KeyError(f"no critical point with id {cid}")


def load_model(source) -> Model:
    """Assemble a model from a config path, JSON string, or dict."""
    if isinstance(source, dict):
        cfg = source
    else:
        text = str(source)
        if not text.lstrip().startswith("{"):
            text = Path(text).read_text()
        try:
            cfg = json.loads(text)
        except json.JSONDecodeError as e:
            raise SchemaError(f"config is not valid JSON: {e}") from None
    return _assemble(cfg)


def _assemble(cfg: dict) -> Model:
    _require(isinstance(cfg, dict), "config must be a JSON object")
    for key in ("group", "action", "linearization"):
        _require(key in cfg, f"config is missing the '{key}' section")
    gcfg = cfg["group"]
    _require(isinstance(gcfg.get("degree"), int) and gcfg["degree"] >= 1,
             "group.degree must be a positive integer")
    degree = gcfg["degree"]
    gens = [Permutation.parse(degree, s) for s in gcfg.get("gamma_generators", [])]
    gamma = group_from_generators(degree, gens)
    _require(gcfg.get("antipodal", True) is True,
             "only antipodal models are supported (group.antipodal must be true)")
    gamma_prime, _ = antipodal_product(gamma)

    acfg = cfg["action"]
    if acfg.get("type") == "permutation":
        images = acfg.get("generator_images")
        _require(isinstance(images, list) and len(images) == len(gens),
                 "action.generator_images must list one permutation per generator")
        k = len(images[0]) if images else degree
        action = OrthogonalAction.from_permutation_images(gamma, gens, images, k)
    elif acfg.get("type") == "matrices":
        mats = acfg.get("generator_matrices")
        _require(isinstance(mats, list) and len(mats) == len(gens),
                 "action.generator_matrices must list one matrix per generator")
        k = len(mats[0]) if mats else int(acfg.get("dimension", 0))
        _require(k >= 1, "action.dimension is required when there are no generators")
        action = OrthogonalAction.from_generator_matrices(gamma, gens, mats, k)
    else:
        raise SchemaError("action.type must be 'permutation' or 'matrices'")

    table = None
    if "character_table" in cfg:
        tcfg = cfg["character_table"]
        reps = [gamma.index[Permutation.parse(degree, s)]
                for s in tcfg["class_representatives"]]
        table = CharacterTable.from_rows(gamma, tcfg["rows"], tcfg.get("labels"),
                                         class_representatives=reps)
    if table is not None:
        components = isotypic_components(action, table)
    else:
        components = _components_from_matrices(gamma, action)

    lcfg = cfg["linearization"]
    _require("a" in lcfg, "linearization.a is required")
    a = float(lcfg["a"])
    C = _coupling_matrix(lcfg, action.dimension)
    if np.abs(C - C.T).max() > 1e-12:
        raise SchemaError("coupling matrix must be symmetric")
    for g, p in zip(gens, (action.matrices[gamma.index[g]] for g in gens)):
        if np.abs(p @ C - C @ p).max() > 1e-12:
            raise EquivarianceViolation(
                f"coupling matrix does not commute with generator {g.cycle_string()}")

    weights = {}
    for comp in components:
        block = comp.basis.T @ C @ comp.basis
        w = float(block.trace()) / block.shape[0]
        if np.abs(block - w * np.eye(block.shape[0])).max() > 1e-9:
            raise NonScalarIsotypicBlock(
                f"coupling is not scalar on the isotypic block of {comp.label}")
        weights[comp.j] = w

    zeta = lcfg.get("zeta", "sigmoid")
    curves = []
    for comp in components:
        w = weights[comp.j]
        if abs(w) < 1e-9:
            raise NonMonotoneCurve(f"eigenvalue curve for {comp.label} is constant")
        if zeta == "sigmoid":
            curves.append(EigenvalueCurve(comp.j, a, w))
        elif isinstance(zeta, dict) and "breakpoints" in zeta:
            pts = tuple((float(x), a + w * float(v)) for x, v in zeta["breakpoints"])
            curves.append(EigenvalueCurve(comp.j, breakpoints=pts))
        else:
            raise SchemaError("linearization.zeta must be 'sigmoid' or {'breakpoints': ...}")

    hcfg = cfg.get("horizon", {})
    m_max = int(hcfg.get("m_max", 12))
    n_max = int(hcfg.get("n_max", 12))
    sup_mu = max(c.codomain()[1] for c in curves)
    bessel = BesselZeroTable.sufficient_for(sup_mu, m_max, n_max)
    critical = critical_points(curves, bessel)

    names = None
    name_table = gcfg.get("subgroup_names", "auto")
    if name_table == "s4xz2" or (name_table == "auto" and gamma_prime.order == 48
                                 and degree == 4 and gamma.order == 24):
        names = s4z2_class_names(gamma_prime)
    elif isinstance(name_table, list):
        names = list(name_table)

    irreps = irreps_with_antipodal(gamma, gamma_prime, action, components)
    ctx = AmbientContext(gamma_prime, irreps, names)

    an = cfg.get("analysis", {})
    mode = an.get("mode", "relative")
    k_fixed = bool(an.get("k_fixed", True))
    bracket = float(an.get("alpha_bracket", 1.0))
    mults = {comp.j: comp.multiplicity for comp in components}
    problem = bif.BifurcationProblem(ctx, curves, bessel, mults, critical,
                                     mode=mode, k_fixed=k_fixed, alpha_bracket=bracket)
    return Model(cfg.get("name", "model"), cfg, gamma, gamma_prime, action, table,
                 components, ctx, a, C, weights, curves, bessel, critical, problem)


def _coupling_matrix(lcfg: dict, k: int) -> np.ndarray:
    spec = lcfg.get("coupling_matrix")
    _require(spec is not None, "linearization.coupling_matrix is required")
    if isinstance(spec, dict):
        _require(spec.get("template") == "adjacency",
                 "only the 'adjacency' coupling template is supported")
        adj = np.asarray(spec["adjacency"], dtype=float)
        _require(adj.shape == (k, k), "adjacency matrix has the wrong shape")
        return float(spec["c"]) * np.eye(k) + float(spec["d"]) * adj
    C = np.asarray(spec, dtype=float)
    _require(C.shape == (k, k), "coupling matrix has the wrong shape")
    return C


def _components_from_matrices(gamma: FiniteGroup, action: OrthogonalAction) -> list[IsotypicComponent]:
    """Isotypic blocks recovered from the matrices alone: eigenspaces of a
    symmetry-averaged generic matrix, merged by equal block characters."""
    k = action.dimension
    rng = np.random.default_rng(7)
    M = rng.standard_normal((k, k))
    M = M + M.T
    Mbar = np.zeros((k, k))
    for x in range(gamma.order):
        R = action.matrices[x]
        Mbar += R @ M @ R.T
    Mbar /= gamma.order
    vals, vecs = np.linalg.eigh(Mbar)
    blocks: list[tuple[np.ndarray, tuple]] = []
    i = 0
    while i < k:
        jref = i
        while i + 1 < k and vals[i + 1] - vals[jref] < 1e-8:
            i += 1
        basis = vecs[:, jref:i + 1]
        chars = tuple(round(float(np.trace(basis.T @ action.matrices[x] @ basis)), 6)
                      for x in range(gamma.order))
        blocks.append((basis, chars))
        i += 1
    merged: dict[tuple, np.ndarray] = {}
    for basis, chars in blocks:
        if chars in merged:
            merged[chars] = np.hstack([merged[chars], basis])
        else:
            merged[chars] = basis
    out = []
    for j, (chars, basis) in enumerate(sorted(merged.items(), key=lambda kv: (kv[1].shape[1], kv[0]))):
        # the character norm of the merged block is the squared multiplicity
        full = [float(np.trace(basis.T @ action.matrices[x] @ basis))
                for x in range(gamma.order)]
        norm = sum(c * c for c in full) / gamma.order
        mult = round(float(np.sqrt(norm)))
        dim_block = basis.shape[1]
        if mult < 1 or dim_block % mult:
            raise NonScalarIsotypicBlock("could not split action into isotypic blocks")
        out.append(IsotypicComponent(j, f"block{j}", dim_block // mult, mult, basis))
    return out


# -- kernel modes ---------------------------------------------------------------------

def model_kernel_mode(model: Model, cid, orbit_type_symbol: Optional[str] = None,
                      coefficients: Optional[Sequence[float]] = None) -> KernelMode:
    """Kernel eigenmode at a critical point.

    Without an orbit type the first coupling eigenvector of the crossing block
    is used for the cosine part; with one, the mode spans the fixed space of
    the type in the crossing representation (its dimension must be 1 modulo the
    choice of scale, which is the tangent-mode situation).
    """
    cp = model.critical_by_id(cid)
    comp = model.component(cp.j)
    q = comp.basis  # V-coordinates of the block
    d = comp.irrep_dim
    if orbit_type_symbol is None:
        if coefficients is None:
            coefficients = [1.0] + [0.0] * (d - 1)
        coefficients = np.asarray(coefficients, dtype=float)
        a_vec = q[:, :d] @ coefficients
        b_vec = np.zeros(model.action.dimension)
        return kernel_mode(cp, model.bessel, a_vec, b_vec)
    t = parse_symbol(model.ctx, orbit_type_symbol)
    if not t.is_finite:
        raise ComputationError(f"{orbit_type_symbol} fixes no nonzero mode at positive frequency")
    u = t if cp.m == 1 else None
    # accept either the frequency-1 type or its fold at the crossing frequency
    for h in maximal_types(model.ctx, 1, cp.j):
        if fold(model.ctx, h, cp.m).key == t.key:
            u = fold(model.ctx, h, cp.m)
            break
        if h.key == t.key:
            u = fold(model.ctx, h, cp.m)
            break
    if u is None:
        u = t
    W = fixed_space(model.ctx, cp.m, cp.j, u.rep)
    if W.shape[1] == 0:
        raise ComputationError(f"{orbit_type_symbol} fixes no kernel direction at {cid}")
    vec = W[:, 0]
    imax = int(np.argmax(np.abs(vec)))
    if vec[imax] < 0:
        vec = -vec
    a_irr, b_irr = vec[:d], vec[d:]
    return kernel_mode(cp, model.bessel, q[:, :d] @ a_irr, q[:, :d] @ b_irr)


# -- report -----------------------------------------------------------------------------

def coupling_spectrum(model: Model) -> list[tuple[int, float, int]]:
    """(j, weight, block multiplicity in V) for every isotypic component."""
    out = []
    for comp in model.components:
        out.append((comp.j, model.weights[comp.j], comp.irrep_dim * comp.multiplicity))
    return out


def _element_terms(e: BurnsideElement) -> list[list]:
    return [[sym, c] for sym, c in e.sorted_terms()]


def run_report(model: Model, modes: Optional[Sequence[str]] = None) -> dict:
    """Full pipeline report; deterministic for a fixed config."""
    prob = model.problem
    modes = list(modes) if modes else ["relative", "full"]
    if prob.mode not in modes:
        modes.insert(0, prob.mode)
    report: dict = {
        "model": {
            "name": model.name,
            "a": model.a,
            "mode": prob.mode,
            "k_fixed": prob.k_fixed,
            "weyl_convention": model.ctx.weyl_mode,
        },
        "isotypic": [
            {"j": comp.j, "label": comp.label, "irrep_dim": comp.irrep_dim,
             "multiplicity": comp.multiplicity, "weight": model.weights[comp.j]}
            for comp in model.components
        ],
        "critical_points": [
            {"id": list(cp.id), "alpha": cp.alpha, "zeta_level": cp.zeta_level}
            for cp in model.critical
        ],
        "invariants": [],
        "profiles": [],
        "certificates": [],
        "verdicts": [],
        "fast_path_checks": [],
        "warnings": list(model.config.get("notes", [])),
    }
    if prob.k_fixed:
        report["warnings"].append(
            "reduced-problem analysis: the odd-frequency filter represents the "
            "reflection-paired fixed-point reduction, while all Burnside arithmetic "
            "stays in the full product ring")
    invariants_by_mode: dict[str, list] = {}
    for mode in modes:
        for cp in model.critical:
            inv = bif.local_invariant(prob, cp, mode=mode)
            invariants_by_mode.setdefault(mode, []).append(inv)
            report["invariants"].append({
                "id": list(cp.id), "mode": mode, "k_fixed": prob.k_fixed,
                "alpha_minus": inv.alpha_minus, "alpha_plus": inv.alpha_plus,
                "terms": _element_terms(inv.value),
            })
    pool = prob.maximal_pool()
    for cp in model.critical:
        for h in pool:
            prof = bif.folding_profile(prob, cp, h)
            report["profiles"].append({
                "id": list(cp.id), "orbit_type": h.symbol, "s_max": prof.s_max,
                "n_minus": {str(k): v for k, v in sorted(prof.n_minus.items())},
                "n_plus": {str(k): v for k, v in sorted(prof.n_plus.items())},
                "indicator": {str(k): v for k, v in sorted(prof.indicator.items())},
                "signed_indicator": {str(k): v for k, v in sorted(prof.signed_indicator.items())},
                "m_minus": {str(k): v for k, v in sorted(prof.m_minus.items())},
                "m_plus": {str(k): v for k, v in sorted(prof.m_plus.items())},
            })
            if prof.s_max is not None:
                entry = {"id": list(cp.id), "orbit_type": h.symbol, "s": prof.s_max}
                try:
                    entry["value"] = bif.theorem_bounded_coeff(prob, cp, h, prof.s_max,
                                                               profile=prof)
                    entry["status"] = "ok"
                except CrossCheckMismatch as e:
                    entry["status"] = f"mismatch: {e}"
                report["fast_path_checks"].append(entry)
        for cert in bif.branch_certificates(prob, cp):
            report["certificates"].append({
                "id": list(cert.cp_id), "orbit_type": cert.orbit_type_symbol,
                "folded": cert.folded_symbol, "s": cert.s,
                "coefficient": cert.coefficient, "statement": cert.statement,
            })
    for h in pool:
        v = bif.global_verdict(prob, h)
        report["verdicts"].append({
            "orbit_type": v.orbit_type_symbol, "s_bar": v.s_bar,
            "members": [list(m) for m in v.members], "parity_odd": v.parity_odd,
            "conclusion": v.conclusion, "folded": v.folded_symbol,
            "direction": v.direction,
        })
    if invariants_by_mode.get(prob.mode):
        total = bif.rabinowitz_sum(invariants_by_mode[prob.mode])
        report["rabinowitz_sum"] = {"mode": prob.mode, "terms": _element_terms(total)}
    else:
        report["rabinowitz_sum"] = {"mode": prob.mode, "terms": []}
    return report


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


# -- bundled example configs --------------------------------------------------------------

def bundled_config(name: str) -> dict:
    """Load one of the packaged example configs by bare name."""
    with resources.files("equideg.data").joinpath(f"{name}.json").open() as f:
        return json.load(f)


def bundled_model(name: str = "six_membranes") -> Model:
    return load_model(bundled_config(name))
