"""Regular-vine copula: structure selection, density, sampling.

Structure selection is the sequential method: tree 1 is the maximum
spanning tree on the variables weighted by |Kendall tau|, and each later
tree is the maximum spanning tree over the pairs allowed by the
proximity condition, weighted by |tau| of the conditioned
pseudo-observations (h-functions of the fitted lower-tree copulas).
Each edge's family is chosen by AIC.

Variables are 0-based internally.  The structure matrix is lower
triangular with 1-based entries (0 = unused): column ``i`` has the
diagonal variable at ``M[i][i]`` and, for each row ``j > i``, the pair
``(M[i][i], M[j][i])`` conditioned on ``{M[j+1][i], ..., M[D-1][i]}`` is
an edge of tree ``D - j``.
"""

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from . import bicop, kernels
from .bicop import BivariateCopula

logger = logging.getLogger(__name__)

CLIP = kernels.CLIP


@dataclass(frozen=True)
class VineEdge:
    conditioned: tuple
    conditioning: tuple
    copula: BivariateCopula

    @property
    def tree(self) -> int:
        return len(self.conditioning) + 1

    @property
    def union(self) -> frozenset:
        return frozenset(self.conditioned) | frozenset(self.conditioning)

    def to_dict(self):
        return {
            "tree": self.tree,
            "conditioned": list(self.conditioned),
            "conditioning": list(self.conditioning),
            "family": self.copula.family,
            "theta": self.copula.theta,
            "loglik": self.copula.loglik,
        }


@dataclass
class RVineModel:
    dim: int
    trees: list
    matrix: np.ndarray = field(repr=False, default=None)
    loglik: float = 0.0

    def __post_init__(self):
        if self.matrix is None:
            self.matrix = structure_matrix(self.trees, self.dim)

    @property
    def kappa(self) -> int:
        return sum(e.copula.n_params for tree in self.trees for e in tree)

    @property
    def edges(self):
        return [e for tree in self.trees for e in tree]

    def to_dict(self):
        return {
            "dim": self.dim,
            "loglik": float(self.loglik),
            "kappa": self.kappa,
            "matrix": [[int(x) for x in row] for row in self.matrix],
            "edges": [e.to_dict() for e in self.edges],
        }

    @classmethod
    def from_dict(cls, d):
        model = model_from_edges(int(d["dim"]), d["edges"])
        model.loglik = float(d.get("loglik", 0.0))
        return model

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


# -- structure validation ---------------------------------------------------

class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def validate_structure(trees, dim) -> None:
    """Raise ValueError unless the trees form a regular vine on ``dim`` nodes."""
    if len(trees) != dim - 1:
        raise ValueError(f"expected {dim - 1} trees, got {len(trees)}")
    lvl1 = trees[0]
    if len(lvl1) != dim - 1:
        raise ValueError("tree 1 must have D-1 edges")
    uf = _UnionFind(dim)
    for e in lvl1:
        a, b = e.conditioned
        if e.conditioning or not (0 <= a < b < dim):
            raise ValueError(f"bad tree-1 edge {e.conditioned}")
        if not uf.union(a, b):
            raise ValueError("tree 1 contains a cycle")

    prev_unions = [e.union for e in lvl1]
    prev_ends = [frozenset(e.conditioned) for e in lvl1]
    for k in range(2, dim):
        edges = trees[k - 1]
        n_nodes = len(prev_unions)
        if len(edges) != dim - k:
            raise ValueError(f"tree {k} must have {dim - k} edges")
        uf = _UnionFind(n_nodes)
        new_unions, new_ends = [], []
        for e in edges:
            if len(e.conditioning) != k - 1 or len(e.conditioned) != 2:
                raise ValueError(f"bad tree-{k} edge {e.conditioned}|{e.conditioning}")
            u_e = e.union
            parents = None
            for m in range(n_nodes):
                if not prev_unions[m] <= u_e:
                    continue
                for n in range(m + 1, n_nodes):
                    if not prev_unions[n] <= u_e:
                        continue
                    if prev_unions[m] | prev_unions[n] != u_e:
                        continue
                    if prev_unions[m] & prev_unions[n] != frozenset(e.conditioning):
                        continue
                    if not prev_ends[m] & prev_ends[n]:
                        continue  # proximity condition
                    parents = (m, n)
                    break
                if parents:
                    break
            if parents is None:
                raise ValueError(
                    f"edge {e.conditioned}|{e.conditioning} violates the proximity condition"
                )
            if not uf.union(*parents):
                raise ValueError(f"tree {k} contains a cycle")
            new_unions.append(u_e)
            new_ends.append(frozenset(parents))
        prev_unions, prev_ends = new_unions, new_ends


# -- structure matrix ---------------------------------------------------------

def structure_matrix(trees, dim) -> np.ndarray:
    """Encode the trees as the lower-triangular structure matrix."""
    mat = np.zeros((dim, dim), dtype=np.int64)
    remaining = set(range(dim))
    for col in range(dim - 1):
        top = dim - 1 - col
        cands = [e for e in trees[top - 1] if e.union <= remaining]
        if len(cands) != 1:
            raise ValueError("trees do not form a regular vine (sub-vine not unique)")
        cur = cands[0]
        x, y = cur.conditioned
        mat[col, col] = x + 1
        mat[col + 1, col] = y + 1
        for row in range(col + 2, dim):
            level = dim - row
            subs = [g for g in trees[level - 1] if x in g.union and g.union <= cur.union]
            if len(subs) != 1:
                raise ValueError("ambiguous descent while building the structure matrix")
            cur = subs[0]
            a, b = cur.conditioned
            if x not in (a, b):
                raise ValueError("descent edge does not condition on the diagonal variable")
            mat[row, col] = (b if a == x else a) + 1
        remaining.discard(x)
    mat[dim - 1, dim - 1] = remaining.pop() + 1
    return mat


def edges_from_matrix(mat) -> set:
    """Decode ``(tree, conditioned, conditioning)`` triples from a structure matrix."""
    dim = mat.shape[0]
    out = set()
    for col in range(dim - 1):
        x = int(mat[col, col]) - 1
        for row in range(col + 1, dim):
            z = int(mat[row, col]) - 1
            cond = tuple(sorted(int(mat[r, col]) - 1 for r in range(row + 1, dim)))
            out.add((dim - row, tuple(sorted((x, z))), cond))
    return out


# -- construction -------------------------------------------------------------

def model_from_edges(dim, edge_dicts) -> RVineModel:
    """Build a model from explicit edge specs (validated)."""
    trees = [[] for _ in range(dim - 1)]
    for d in edge_dicts:
        conditioned = tuple(sorted(int(x) for x in d["conditioned"]))
        conditioning = tuple(sorted(int(x) for x in d.get("conditioning", ())))
        cop = BivariateCopula(
            family=d["family"], theta=float(d.get("theta", 0.0)),
            loglik=float(d.get("loglik", 0.0)),
        )
        tree = len(conditioning) + 1
        if not 1 <= tree <= dim - 1:
            raise ValueError(f"edge {conditioned}|{conditioning} has invalid tree level")
        trees[tree - 1].append(VineEdge(conditioned, conditioning, cop))
    for level in trees:
        level.sort(key=lambda e: e.conditioned)
    validate_structure(trees, dim)
    return RVineModel(dim=dim, trees=trees)


# -- structure selection -------------------------------------------------------

def _max_spanning_tree(n_nodes, weighted):
    """Kruskal on ``(m, n, weight)`` with deterministic tie-breaking."""
    uf = _UnionFind(n_nodes)
    chosen = []
    for m, n, _ in sorted(weighted, key=lambda t: (-t[2], t[0], t[1])):
        if uf.union(m, n):
            chosen.append((m, n))
            if len(chosen) == n_nodes - 1:
                break
    if len(chosen) != n_nodes - 1:
        raise ValueError("candidate graph is not connected")
    return chosen


def select_structure(uniform_matrix, families=bicop.FAMILIES) -> RVineModel:
    """Fit structure, pair-copula families and parameters sequentially."""
    u_mat = np.clip(np.asarray(uniform_matrix, dtype=np.float64), CLIP, 1.0 - CLIP)
    t_rows, dim = u_mat.shape
    if t_rows < 30:
        raise ValueError(f"need at least 30 rows to select a structure, got {t_rows}")

    # tree 1: nodes are the variables
    weighted = []
    for i in range(dim):
        for j in range(i + 1, dim):
            tau = bicop.kendall_tau(u_mat[:, i], u_mat[:, j])
            weighted.append((i, j, abs(tau)))
    chosen = _max_spanning_tree(dim, weighted)

    # per selected edge: fitted copula plus both conditional arrays
    level_nodes = []  # (union, endpoints-as-node-ids, cond dict var -> array)
    tree_edges = []
    for i, j in sorted(chosen):
        cop = bicop.select_family(u_mat[:, i], u_mat[:, j], families)
        cond = {
            i: np.clip(bicop.hfunc(cop, u_mat[:, i], u_mat[:, j]), CLIP, 1 - CLIP),
            j: np.clip(bicop.hfunc(cop, u_mat[:, j], u_mat[:, i]), CLIP, 1 - CLIP),
        }
        level_nodes.append((frozenset((i, j)), frozenset((i, j)), cond))
        tree_edges.append(VineEdge((i, j), (), cop))
    trees = [tree_edges]

    for level in range(2, dim):
        n_nodes = len(level_nodes)
        cands = []
        for m in range(n_nodes):
            um, em, cm = level_nodes[m]
            for n in range(m + 1, n_nodes):
                un, en, cn = level_nodes[n]
                if not em & en:
                    continue  # proximity condition
                inter = um & un
                sym = sorted((um | un) - inter)
                if len(sym) != 2:
                    continue
                a, b = sym
                wa = cm[a] if a in um else cn[a]
                wb = cn[b] if b in un else cm[b]
                tau = bicop.kendall_tau(wa, wb)
                cands.append((m, n, abs(tau), a, b, tuple(sorted(inter)), wa, wb))
        chosen = _max_spanning_tree(n_nodes, [(c[0], c[1], c[2]) for c in cands])
        by_pair = {(c[0], c[1]): c for c in cands}
        new_nodes, new_edges = [], []
        for m, n in sorted(chosen):
            _, _, _, a, b, conditioning, wa, wb = by_pair[(m, n)]
            cop = bicop.select_family(wa, wb, families)
            cond = {
                a: np.clip(bicop.hfunc(cop, wa, wb), CLIP, 1 - CLIP),
                b: np.clip(bicop.hfunc(cop, wb, wa), CLIP, 1 - CLIP),
            }
            union = frozenset((a, b)) | frozenset(conditioning)
            new_nodes.append((union, frozenset((m, n)), cond))
            new_edges.append(VineEdge((a, b), conditioning, cop))
        trees.append(new_edges)
        level_nodes = new_nodes

    model = RVineModel(dim=dim, trees=trees)
    model.loglik = loglik(model, u_mat)
    return model


# -- density -------------------------------------------------------------------

def _forward_terms(model, u_mat):
    """Per-edge conditional argument arrays, propagated tree by tree."""
    cache = {(v, frozenset()): u_mat[:, v] for v in range(model.dim)}
    terms = []
    for tree in model.trees:
        for e in tree:
            a, b = e.conditioned
            dset = frozenset(e.conditioning)
            wa = cache[(a, dset)]
            wb = cache[(b, dset)]
            terms.append((e, wa, wb))
            cache[(a, dset | {b})] = np.clip(
                bicop.hfunc(e.copula, wa, wb), CLIP, 1 - CLIP)
            cache[(b, dset | {a})] = np.clip(
                bicop.hfunc(e.copula, wb, wa), CLIP, 1 - CLIP)
    return terms


def logdensity_rows(model: RVineModel, uniform_matrix) -> np.ndarray:
    """Log copula density per row of a T x D matrix."""
    u_mat = np.atleast_2d(np.asarray(uniform_matrix, dtype=np.float64))
    if u_mat.shape[1] != model.dim:
        raise ValueError("dimension mismatch")
    if np.any((u_mat <= 0.0) | (u_mat >= 1.0)):
        raise ValueError("uniforms must lie strictly inside (0, 1)")
    u_mat = np.clip(u_mat, CLIP, 1.0 - CLIP)
    out = np.zeros(u_mat.shape[0])
    for e, wa, wb in _forward_terms(model, u_mat):
        out += bicop.log_density(e.copula, wa, wb)
    return out


def logdensity(model: RVineModel, u_vector) -> float:
    """Log copula density at one point of the unit hypercube."""
    return float(logdensity_rows(model, np.asarray(u_vector)[None, :])[0])


def loglik(model: RVineModel, uniform_matrix) -> float:
    return float(np.sum(logdensity_rows(model, uniform_matrix)))


def aic(model) -> float:
    return -2.0 * model.loglik + 2.0 * model.kappa


def bic(model, t_rows: int) -> float:
    return -2.0 * model.loglik + model.kappa * np.log(t_rows)


# -- sampling --------------------------------------------------------------------

def _edge_map(model):
    emap = {}
    for e in model.edges:
        a, b = e.conditioned
        dset = frozenset(e.conditioning)
        emap[(a, dset | {b})] = (e, b)
        emap[(b, dset | {a})] = (e, a)
    return emap


def sample_rvine(model: RVineModel, n_samples: int, seed) -> np.ndarray:
    """Inverse-Rosenblatt sampling along the structure matrix diagonal."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    dim = model.dim
    rng = np.random.default_rng(seed)
    v_mat = rng.random((n_samples, dim))
    mat = model.matrix
    emap = _edge_map(model)
    order = [int(mat[i, i]) - 1 for i in range(dim)]

    cache = {}
    u_cols = [None] * dim

    def cond(var, subset):
        key = (var, subset)
        if key in cache:
            return cache[key]
        edge, other = emap[key]
        dset = frozenset(edge.conditioning)
        val = np.clip(
            bicop.hfunc(edge.copula, cond(var, dset), cond(other, dset)),
            CLIP, 1 - CLIP,
        )
        cache[key] = val
        return val

    last = order[-1]
    u_cols[last] = v_mat[:, last]
    cache[(last, frozenset())] = u_cols[last]
    for i in range(dim - 2, -1, -1):
        x = order[i]
        w = np.clip(v_mat[:, x], CLIP, 1 - CLIP)
        for row in range(i + 1, dim):
            z = int(mat[row, i]) - 1
            below = frozenset(int(mat[r, i]) - 1 for r in range(row + 1, dim))
            edge, _ = emap[(x, below | {z})]
            w = np.clip(bicop.hfunc_inv(edge.copula, w, cond(z, below)), CLIP, 1 - CLIP)
        u_cols[x] = w
        cache[(x, frozenset())] = w
    return np.stack(u_cols, axis=1)
