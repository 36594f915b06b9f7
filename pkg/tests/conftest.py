import itertools

import numpy as np
import pytest

from persheat.complex import build_complex, monotone_repair

# Worked example: four vertices, five edges, two triangles.
WORKED_NAMES = list("abcdefghijk")
WORKED_SIMPLICES = [
    ["a"], ["b"], ["c"], ["d"],
    ["a", "b"], ["b", "c"], ["c", "d"], ["a", "d"], ["a", "c"],
    ["a", "b", "c"], ["a", "c", "d"],
]
WORKED_WEIGHTS = {"a": 0, "b": 1, "c": 2, "d": 4, "e": 3, "f": 6, "g": 5, "h": 7, "i": 8, "j": 9, "k": 10}


@pytest.fixture
def worked():
    K = build_complex(WORKED_SIMPLICES)
    w = np.array([WORKED_WEIGHTS[n] for n in WORKED_NAMES], dtype=np.float64)
    return K, w


def random_complex(rng, max_vertices=8):
    """Random complex on at most ``max_vertices`` vertices, dimension <= 2."""
    n = int(rng.integers(1, max_vertices + 1))
    verts = list(range(n))
    edges = [e for e in itertools.combinations(verts, 2) if rng.random() < 0.6]
    eset = set(edges)
    tris = [
        t for t in itertools.combinations(verts, 3)
        if {(t[0], t[1]), (t[0], t[2]), (t[1], t[2])} <= eset and rng.random() < 0.5
    ]
    return build_complex([[v] for v in verts] + [list(e) for e in edges] + [list(t) for t in tris])


def random_filtration(rng, max_vertices=8):
    K = random_complex(rng, max_vertices)
    # small integer range so that ties are common
    x = rng.integers(0, 6, K.k).astype(np.float64)
    return K, monotone_repair(K, x)


def gf2_rank(M) -> int:
    """Rank over Z/2 by Gaussian elimination (independent of the library)."""
    A = (np.asarray(M, dtype=np.uint8) & 1).copy()
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i, c]), None)
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        for i in range(rows):
            if i != r and A[i, c]:
                A[i] ^= A[r]
        r += 1
        if r == rows:
            break
    return r


def betti_oracle(K, w, t) -> dict:
    """Betti numbers of the sublevel complex {w <= t} from dense boundary ranks."""
    keep = [i for i in range(K.k) if w[i] <= t]
    by_dim = {}
    for i in keep:
        by_dim.setdefault(K[i].dim, []).append(i)
    pos = {d: {s: j for j, s in enumerate(ss)} for d, ss in by_dim.items()}

    def rank_boundary(d):
        if d not in by_dim or d - 1 not in by_dim:
            return 0
        M = np.zeros((len(by_dim[d - 1]), len(by_dim[d])), dtype=np.uint8)
        for j, s in enumerate(by_dim[d]):
            for f in K.faces[s]:
                M[pos[d - 1][f], j] = 1
        return gf2_rank(M)

    return {
        d: len(by_dim.get(d, [])) - rank_boundary(d) - rank_boundary(d + 1)
        for d in range(3)
    }
