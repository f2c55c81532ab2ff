"""Extremal contractions, flips, the D-MMP driver, and the negativity oracle.

The driver is the trichotomy loop: while the divisor is not nef over the
base, contract a negative extremal ray; a fano contraction ends the run, a
divisorial contraction drops the Picard rank by one, a flipping contraction
is resolved by an exhaustive triangulation search with an ampleness
certificate.  Every step is recorded with its certificates and termination
is witnessed by a no-repeat set of fans.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import exactlin as xl
from .errors import InputError, InvariantBreach, PreconditionError
from .fan import (Fan, FanMap, cone_contains, cone_covered_by_gens, cone_dim,
                  cone_eq, cone_intersection, common_refinement,
                  identity_map, validate_fan)
from .divisor import (InvariantDivisor, pullback, pushforward,
                      support_function, NotQCartier)
from .curves import (CurveClass, Wall, contracted_walls, ne_cone, nefness,
                     wall_relation, walls)


@dataclass(frozen=True)
class ContractionResult:
    kind: str                     # 'fano' | 'divisorial' | 'flipping'
    target: Fan
    contraction: FanMap           # source fan -> target fan
    base_map: FanMap              # target fan -> original base
    removed_ray: Optional[tuple] = None
    merged_cones: tuple = ()      # ray-index tuples in source indexing
    quotient_matrix: Optional[tuple] = None


def _merge_groups(F: Fan, wall_set):
    """Union-find of maximal cones across the given walls."""
    parent = list(range(len(F.max_cones)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    idx = {c: i for i, c in enumerate(F.max_cones)}
    for w in wall_set:
        a, b = find(idx[w.side_a]), find(idx[w.side_b])
        if a != b:
            parent[a] = b
    groups = {}
    for i, c in enumerate(F.max_cones):
        groups.setdefault(find(i), []).append(c)
    return list(groups.values())


def _section_of_projection(P):
    """Integer right inverse s with P s = identity (P comes from a Smith
    transform, so one exists)."""
    rows = [list(r) for r in P]
    cols = []
    k = len(P)
    for j in range(k):
        e = [1 if i == j else 0 for i in range(k)]
        x = xl.integer_solve(rows, e)
        if x is None:
            raise InvariantBreach("quotient projection has no integer section")
        cols.append(x)
    return tuple(tuple(cols[j][i] for j in range(k)) for i in range(len(cols[0])))


def contract(m: FanMap, wall_set) -> ContractionResult:
    """Contract the extremal face spanned by the given walls.

    Maximal cones are merged transitively across the walls; the merged cone
    decides the trichotomy: a line inside means fano (quotient lattice), an
    interior ray means divisorial (ray removed), otherwise flipping (small,
    non-simplicial target cone).
    """
    F = m.source
    groups = [g for g in _merge_groups(F, wall_set)]
    merged = [g for g in groups if len(g) > 1]
    if not merged:
        raise PreconditionError("wall set contracts nothing")
    merged_ray_sets = [tuple(sorted(set(itertools.chain.from_iterable(g))))
                       for g in merged]

    # fano: some merged cone contains a line
    for g, rayset in zip(merged, merged_ray_sets):
        gens = F.cone_gens(rayset)
        circ = xl.positive_circuit_indices(list(gens))
        if circ:
            lin_gens = [gens[i] for i in circ]
            P = xl.quotient_projection(lin_gens, F.rank)
            if any(not xl.is_zero(xl.mat_vec(m.matrix, v)) for v in lin_gens) \
                    and m.target.rank > 0:
                raise InvariantBreach("contracted fibers are not vertical over the base")
            ray_list, cones = [], []
            for c in F.max_cones:
                imgs = [tuple(int(a) for a in xl.mat_vec(P, F.rays[i])) for i in c]
                imgs = [w for w in imgs if not xl.is_zero(w)]
                if not imgs:
                    cones.append(())
                    continue
                ext = sorted({xl.primitive(imgs[k]) for k in xl.extreme_rays(imgs)})
                idxs = []
                for r in ext:
                    if r not in ray_list:
                        ray_list.append(r)
                    idxs.append(ray_list.index(r))
                cones.append(tuple(sorted(idxs)))
            # drop cones contained in others
            keep = []
            for c in set(cones):
                gens_c = tuple(ray_list[i] for i in c)
                if not any(set(c) < set(d) or
                           (c != d and all(cone_contains(tuple(ray_list[i] for i in d), v)
                                           for v in gens_c))
                           for d in set(cones)):
                    keep.append(c)
            Z = Fan(len(P), tuple(ray_list), tuple(sorted(keep)))
            bad = validate_fan(Z)
            if bad:
                raise InvariantBreach(f"fano quotient fan invalid: {bad}")
            if m.target.rank == 0:
                base = FanMap((), Z, m.target)
            else:
                s = _section_of_projection(P)
                B = tuple(tuple(xl.dot(row, col) for col in zip(*s))
                          for row in m.matrix)
                base = FanMap(B, Z, m.target)
            return ContractionResult("fano", Z, FanMap(P, F, Z), base,
                                     quotient_matrix=tuple(P))

    # divisorial: a merged cone with a non-extreme generator (the removed
    # ray may sit inside a proper face, not only in the full interior)
    interior = []
    for rayset in merged_ray_sets:
        gens = F.cone_gens(rayset)
        ext = set(xl.extreme_rays(list(gens)))
        for pos, i in enumerate(rayset):
            if pos not in ext:
                interior.append(i)
    if interior:
        # the same ray may be swallowed by several merged groups at once
        if len(set(interior)) != 1:
            raise PreconditionError(
                "more than one interior ray; not an extremal-ray contraction")
        ray = interior[0]
        survivors = [i for i in range(len(F.rays)) if i != ray]
        reindex = {old: new for new, old in enumerate(survivors)}
        new_cones = []
        for g, rayset in zip(merged, merged_ray_sets):
            kept = tuple(sorted(reindex[i] for i in rayset if i != ray))
            gens = tuple(F.rays[i] for i in rayset if i != ray)
            if len(gens) != cone_dim(gens):
                raise InvariantBreach("divisorial target cone is not simplicial")
            new_cones.append(kept)
        merged_members = set(itertools.chain.from_iterable(merged))
        for c in F.max_cones:
            if c not in merged_members:
                if ray in c:
                    raise InvariantBreach("removed ray survives in an unmerged cone")
                new_cones.append(tuple(sorted(reindex[i] for i in c)))
        Z = Fan(F.rank, tuple(F.rays[i] for i in survivors),
                tuple(sorted(set(new_cones))))
        bad = validate_fan(Z)
        if bad:
            raise InvariantBreach(f"divisorial target fan invalid: {bad}")
        return ContractionResult("divisorial", Z, identity_map(F, Z),
                                 FanMap(m.matrix, Z, m.target),
                                 removed_ray=F.rays[ray])

    # flipping: small, merged cones become non-simplicial
    new_cones = list(merged_ray_sets)
    merged_members = set(itertools.chain.from_iterable(merged))
    for c in F.max_cones:
        if c not in merged_members:
            new_cones.append(c)
    Z = Fan(F.rank, F.rays, tuple(sorted(set(new_cones))))
    bad = validate_fan(Z)
    if bad:
        raise InvariantBreach(f"flipping target fan invalid: {bad}")
    return ContractionResult("flipping", Z, identity_map(F, Z),
                             FanMap(m.matrix, Z, m.target),
                             merged_cones=tuple(merged_ray_sets))


# ---------------------------------------------------------------------------
# flips
# ---------------------------------------------------------------------------

def _triangulations(F: Fan, rayset):
    """All simplicial triangulations of cone(rayset) using exactly its own
    rays, as sorted tuples of cells."""
    gens = F.cone_gens(rayset)
    d = cone_dim(gens)
    cells = [sub for sub in itertools.combinations(rayset, d)
             if cone_dim(F.cone_gens(sub)) == d]
    results = []

    def compatible(c1, c2):
        g1, g2 = F.cone_gens(c1), F.cone_gens(c2)
        inter = cone_intersection(g1, g2)
        shared = F.cone_gens(tuple(sorted(set(c1) & set(c2))))
        return cone_eq(inter, shared) if (inter or shared) else True

    def search(chosen, rest):
        if cone_covered_by_gens(gens, [F.cone_gens(c) for c in chosen]):
            t = tuple(sorted(chosen))
            if t not in results:
                results.append(t)
            return
        if not rest:
            return
        head, tail = rest[0], rest[1:]
        if all(compatible(head, c) for c in chosen):
            search(chosen + [head], tail)
        search(chosen, tail)

    search([], cells)
    # keep only irredundant ones (every cell needed)
    out = []
    for t in results:
        if not any(set(s) < set(t) for s in results):
            out.append(t)
    return out


def flip(m: FanMap, wall_set, D: InvariantDivisor):
    """Elementary transformation across a flipping contraction.

    For each merged cone all triangulations on its own rays are enumerated;
    the unique one other than the original making D strictly positive on the
    internal walls (ampleness over the small target) is selected.
    Returns (flipped fan, map to the small target, transported divisor).
    """
    res = contract(m, wall_set)
    if res.kind != "flipping":
        raise PreconditionError(f"contraction is {res.kind}, not flipping")
    F = m.source
    replacement = {}
    for rayset in res.merged_cones:
        original = tuple(sorted(c for c in F.max_cones if set(c) <= set(rayset)))
        choices = []
        for t in _triangulations(F, rayset):
            if t == original:
                continue
            cand = _replace_cones(F, {rayset: t})
            if _ample_on_merged(cand, D, rayset):
                choices.append(t)
        if len(choices) != 1:
            raise InvariantBreach(
                f"expected exactly one ample triangulation, found {len(choices)}")
        replacement[rayset] = choices[0]
    Xp = _replace_cones(F, replacement)
    bad = validate_fan(Xp)
    if bad:
        raise InvariantBreach(f"flipped fan invalid: {bad}")
    if set(Xp.rays) != set(F.rays):
        raise InvariantBreach("flip changed the ray set")
    return Xp, identity_map(Xp, res.target), InvariantDivisor(D.coeffs)


def _replace_cones(F: Fan, replacement) -> Fan:
    merged_members = set()
    new_cones = []
    for rayset, cells in replacement.items():
        for c in F.max_cones:
            if set(c) <= set(rayset):
                merged_members.add(c)
        new_cones.extend(cells)
    for c in F.max_cones:
        if c not in merged_members:
            new_cones.append(c)
    return Fan(F.rank, F.rays, tuple(sorted(set(new_cones))))


def _ample_on_merged(F: Fan, D: InvariantDivisor, rayset) -> bool:
    """Q-Cartier and strictly positive on every wall interior to
    cone(rayset)."""
    try:
        support_function(F, D)
    except NotQCartier:
        return False
    for w in walls(F):
        if set(w.side_a) <= set(rayset) and set(w.side_b) <= set(rayset):
            if wall_relation(F, w).pair(D) <= 0:
                return False
    return True


# ---------------------------------------------------------------------------
# the driver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MMPStep:
    kind: str                      # 'divisorial' | 'flipping' | 'fano'
    chosen_class: CurveClass
    value: Fraction                # D . chosen class (negative)
    rho_before: int
    rho_after: Optional[int]
    fan_after: Fan
    divisor_after: Optional[InvariantDivisor]
    removed_ray: Optional[tuple] = None
    flip_positive_value: Optional[Fraction] = None


@dataclass(frozen=True)
class MMPTrace:
    steps: tuple
    outcome: str                   # 'minimal' | 'fano'
    final_fan: Fan
    final_map: FanMap
    final_divisor: Optional[InvariantDivisor]


def _negative_extremal(ne, D):
    return [c for c in ne.extremal_rays if c.pair(D) < 0]


def run_mmp(m: FanMap, D: InvariantDivisor, max_steps: int = 10000) -> MMPTrace:
    """D-MMP over the base of m; returns the full certified trace.

    Ray selection: among the D-negative extremal classes, prefer one whose
    contraction is divisorial or flipping, lexicographically smallest class
    first; fano contractions are taken only when no alternative exists.
    """
    cur_map, cur_D = m, D
    steps = []
    seen = {m.source.canonical()}
    for _ in range(max_steps):
        F = cur_map.source
        ne = ne_cone(cur_map)
        verdict = nefness(cur_D, cur_map)
        if verdict.nef:
            return MMPTrace(tuple(steps), "minimal", F, cur_map, cur_D)
        negative = _negative_extremal(ne, cur_D)
        if not negative:
            raise InvariantBreach("divisor not nef but no negative extremal ray")
        pairs = contracted_walls(cur_map)
        chosen = None
        fano_fallback = None
        for c in sorted(negative, key=lambda c: c.coeffs):
            wall_set = [w for w, cc in pairs if cc == c]
            res = contract(cur_map, wall_set)
            if res.kind != "fano":
                chosen = (c, wall_set, res)
                break
            if fano_fallback is None:
                fano_fallback = (c, wall_set, res)
        if chosen is None:
            chosen = fano_fallback
        c, wall_set, res = chosen
        value = c.pair(cur_D)

        if res.kind == "fano":
            steps.append(MMPStep("fano", c, value, ne.rho, None,
                                 res.target, None))
            return MMPTrace(tuple(steps), "fano", res.target, res.base_map, None)

        if res.kind == "divisorial":
            new_map = res.base_map
            new_D = pushforward(res.contraction, cur_D)
            rho_after = ne_cone(new_map).rho
            if rho_after != ne.rho - 1:
                raise InvariantBreach(
                    f"divisorial step must drop rho by one ({ne.rho} -> {rho_after})")
            key = res.target.canonical()
            if key in seen:
                raise InvariantBreach("fan repeated; termination violated")
            seen.add(key)
            steps.append(MMPStep("divisorial", c, value, ne.rho, rho_after,
                                 res.target, new_D, removed_ray=res.removed_ray))
            cur_map, cur_D = new_map, new_D
            continue

        # flipping
        Xp, to_w, Dp = flip(cur_map, wall_set, cur_D)
        new_map = FanMap(cur_map.matrix, Xp, cur_map.target)
        new_ne = ne_cone(new_map)
        if new_ne.rho != ne.rho:
            raise InvariantBreach("flip must preserve rho")
        pos = None
        for w in walls(Xp):
            both = set(w.side_a) | set(w.side_b)
            if any(both <= set(rs) for rs in res.merged_cones):
                val = wall_relation(Xp, w).pair(Dp)
                if val <= 0:
                    raise InvariantBreach("flipped divisor not positive on new wall")
                pos = val
        key = Xp.canonical()
        if key in seen:
            raise InvariantBreach("fan repeated; termination violated")
        seen.add(key)
        steps.append(MMPStep("flipping", c, value, ne.rho, new_ne.rho,
                             Xp, Dp, flip_positive_value=pos))
        cur_map, cur_D = new_map, Dp
    raise InvariantBreach("step limit exceeded")


# ---------------------------------------------------------------------------
# face contraction (ample model of a nef divisor)
# ---------------------------------------------------------------------------

def contract_face(m: FanMap, D: InvariantDivisor):
    """Merge across every contracted wall where D pairs to zero; the result
    is the D-ample model (possibly non-simplicial).  Returns
    (fan, contraction map, descended divisor)."""
    verdict = nefness(D, m)
    if not verdict.nef:
        raise PreconditionError("divisor is not nef over the base")
    F = m.source
    pairs = contracted_walls(m)
    zero_walls = [w for w, c in pairs if c.pair(D) == 0]
    if not zero_walls:
        return F, identity_map(F, F), InvariantDivisor(D.coeffs)
    groups = _merge_groups(F, zero_walls)
    for g in groups:
        if len(g) < 2:
            continue
        rayset = tuple(sorted(set(itertools.chain.from_iterable(g))))
        if xl.cone_contains_line(list(F.cone_gens(rayset))):
            return _contract_fibration_face(m, D, zero_walls, groups)
    ray_list, cones, coeff_at = [], [], {}
    for g in groups:
        rayset = tuple(sorted(set(itertools.chain.from_iterable(g))))
        gens = F.cone_gens(rayset)
        if len(g) > 1:
            # D must descend: one covector fits the whole merged cone
            sol = xl.solve_linear([F.rays[i] for i in rayset],
                                  [-D.coeffs[i] for i in rayset])
            if sol is None:
                raise InvariantBreach("divisor does not descend to the merged cone")
            ext = set(xl.extreme_rays(gens)) if gens else set()
            keep = [rayset[k] for k in sorted(ext)]
        else:
            keep = list(rayset)
        idxs = []
        for i in keep:
            r = F.rays[i]
            if r not in ray_list:
                ray_list.append(r)
                coeff_at[r] = D.coeffs[i]
            idxs.append(ray_list.index(r))
        cones.append(tuple(sorted(idxs)))
    Z = Fan(F.rank, tuple(ray_list), tuple(sorted(set(cones))))
    bad = validate_fan(Z)
    if bad:
        raise InvariantBreach(f"ample model fan invalid: {bad}")
    Dz = InvariantDivisor(tuple(coeff_at[r] for r in Z.rays))
    return Z, identity_map(F, Z), Dz


def _contract_fibration_face(m: FanMap, D: InvariantDivisor, zero_walls, groups):
    """Ample model when the D-trivial face is a fibration: some merged cone
    contains a line, so the model lives in a quotient lattice."""
    F = m.source
    for g in groups:
        if len(g) < 2:
            continue
        rayset = tuple(sorted(set(itertools.chain.from_iterable(g))))
        # D must still be linear across the merged region
        if xl.solve_linear([F.rays[i] for i in rayset],
                           [-D.coeffs[i] for i in rayset]) is None:
            raise InvariantBreach("divisor does not descend to the merged cone")
    res = contract(m, zero_walls)
    if res.kind != "fano":
        raise InvariantBreach("line-containing merged cone did not yield a "
                              "fibration contraction")
    Z = res.target
    if Z.rank == 0:
        return Z, res.contraction, InvariantDivisor(())
    s = _section_of_projection(res.quotient_matrix)
    psi = support_function(F, D)
    coeffs = tuple(-psi.value(xl.mat_vec(s, w)) for w in Z.rays)
    return Z, res.contraction, InvariantDivisor(coeffs)


# ---------------------------------------------------------------------------
# negativity oracle
# ---------------------------------------------------------------------------

def verify_negativity(mu_side, nu_side) -> InvariantDivisor:
    """Negativity-lemma oracle.

    Each side is (Fan X, FanMap X->W, divisor).  Checks the hypotheses
    (equal pushforwards on common rays; -D strictly nef over W on the first
    side, D' strictly nef over W on the second), builds the common
    refinement Z, and certifies E = (pullback of D) - (pullback of D') to be
    effective, supported away from the rays of W, and nonzero whenever
    either side is a non-trivial modification.
    """
    X, f, D = mu_side
    Xp, g, Dp = nu_side
    if f.target.canonical() != g.target.canonical():
        raise PreconditionError("the two sides must share the small target")
    W = f.target
    common = set(X.rays) & set(Xp.rays)
    for r in common:
        if D.coeffs[X.rays.index(r)] != Dp.coeffs[Xp.rays.index(r)]:
            raise PreconditionError(
                f"pushforwards disagree at common ray {r}")
    v1 = nefness(D.scale(-1), f, strict=True)
    if not (v1.nef and v1.strict):
        raise PreconditionError("-D is not strictly nef over the small target")
    v2 = nefness(Dp, g, strict=True)
    if not (v2.nef and v2.strict):
        raise PreconditionError("D' is not strictly nef over the small target")
    Z, mu, nu = common_refinement(X, Xp)
    E = pullback(mu, D) - pullback(nu, Dp)
    if not E.is_effective():
        raise InvariantBreach("negativity failed: E has a negative coefficient")
    w_rays = set(W.rays)
    for r, e in zip(Z.rays, E.coeffs):
        if e != 0 and r in w_rays:
            raise InvariantBreach("E is not exceptional over the small target")
    nontrivial = (X.canonical() != W.canonical()
                  or Xp.canonical() != W.canonical())
    if nontrivial and E.is_zero():
        raise InvariantBreach("E vanishes although a side is non-trivial")
    return E
