"""Finitely generated groups with symmetric generating sets, and Cayley-graph
balls truncated at a given word-length radius.

Supported families: free abelian Z^d ("z:d"), free groups ("free:k"), the
lamplighter group Z_2 wr Z ("lamplighter"), and direct products
("prod(a,b)"). Elements are stored in canonical normal forms (equality of
elements is equality of normal forms) and balls are built by breadth-first
search from the identity with generators applied in declaration order, which
fixes the vertex indexing used everywhere downstream.
"""

from collections import deque

import numpy as np

from .errors import ResourceError, ValidationError
from .orlicz import FiniteFunction

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


class FreeAbelian:
    """Z^d with generators +-e_i; elements are integer d-tuples."""

    def __init__(self, d: int):
        if d < 1:
            raise ValidationError("z:d requires d >= 1")
        self.d = d
        self.spec = f"z:{d}"
        self.gen_names = []
        self._gens = []
        for i in range(d):
            plus = tuple(1 if j == i else 0 for j in range(d))
            minus = tuple(-1 if j == i else 0 for j in range(d))
            self.gen_names += [f"+e{i + 1}", f"-e{i + 1}"]
            self._gens += [plus, minus]
        self.inverse_index = [i ^ 1 for i in range(2 * d)]

    def identity(self):
        return (0,) * self.d

    def generators(self):
        return list(self._gens)

    def mul(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def inv(self, a):
        return tuple(-x for x in a)

    def nf_str(self, a) -> str:
        return ",".join(str(x) for x in a)

    def parse_nf(self, s: str):
        parts = s.split(",")
        if len(parts) != self.d:
            raise ValidationError(f"bad normal form {s!r} for {self.spec}")
        return tuple(int(x) for x in parts)


class FreeGroup:
    """Free group on k letters; elements are reduced words, one character per
    letter with uppercase marking inverses. Identity serializes as "e"."""

    def __init__(self, k: int):
        if not 1 <= k <= 26:
            raise ValidationError("free:k requires 1 <= k <= 26")
        self.k = k
        self.spec = f"free:{k}"
        self.gen_names = []
        self._gens = []
        for i in range(k):
            self.gen_names += [_LETTERS[i], _LETTERS[i].upper()]
            self._gens += [_LETTERS[i], _LETTERS[i].upper()]
        self.inverse_index = [i ^ 1 for i in range(2 * k)]

    def identity(self):
        return ""

    def generators(self):
        return list(self._gens)

    def mul(self, a, b):
        out = list(a)
        for ch in b:
            if out and out[-1] == ch.swapcase():
                out.pop()
            else:
                out.append(ch)
        return "".join(out)

    def inv(self, a):
        return a[::-1].swapcase()

    def nf_str(self, a) -> str:
        return a if a else "e"

    def parse_nf(self, s: str):
        if s == "e":
            return ""
        word = s
        for ch in word:
            if ch.lower() not in _LETTERS[: self.k]:
                raise ValidationError(f"bad normal form {s!r} for {self.spec}")
        return word


class Lamplighter:
    """Z_2 wr Z with generators t (move right), t^-1 and the self-inverse lamp
    toggle a at the cursor. Elements are (frozenset of lit positions, cursor).

    Multiplication: (L1, p1) * (L2, p2) = (L1 xor (L2 + p1), p1 + p2).
    Normal form string "l1,l2,...|pos" with lamps sorted ("|0" = identity).
    """

    def __init__(self):
        self.spec = "lamplighter"
        self.gen_names = ["t", "T", "a"]
        self._gens = [(frozenset(), 1), (frozenset(), -1), (frozenset({0}), 0)]
        self.inverse_index = [1, 0, 2]

    def identity(self):
        return (frozenset(), 0)

    def generators(self):
        return list(self._gens)

    def mul(self, a, b):
        lamps1, p1 = a
        lamps2, p2 = b
        return (lamps1 ^ frozenset(x + p1 for x in lamps2), p1 + p2)

    def inv(self, a):
        lamps, p = a
        return (frozenset(x - p for x in lamps), -p)

    def nf_str(self, a) -> str:
        lamps, p = a
        return ",".join(str(x) for x in sorted(lamps)) + f"|{p}"

    def parse_nf(self, s: str):
        lamps_part, sep, pos_part = s.partition("|")
        if not sep:
            raise ValidationError(f"bad normal form {s!r} for {self.spec}")
        lamps = frozenset(int(x) for x in lamps_part.split(",") if x != "")
        return (lamps, int(pos_part))


class DirectProduct:
    """Direct product; generators are the embedded factor generators, left
    factor first, names prefixed "L." and "R."."""

    def __init__(self, left, right):
        self.left = left
        self.right = right
        self.spec = f"prod({left.spec},{right.spec})"
        el, er = left.identity(), right.identity()
        self.gen_names = [f"L.{n}" for n in left.gen_names] + \
                         [f"R.{n}" for n in right.gen_names]
        self._gens = [(g, er) for g in left.generators()] + \
                     [(el, g) for g in right.generators()]
        off = len(left.gen_names)
        self.inverse_index = list(left.inverse_index) + \
                             [off + i for i in right.inverse_index]

    def identity(self):
        return (self.left.identity(), self.right.identity())

    def generators(self):
        return list(self._gens)

    def mul(self, a, b):
        return (self.left.mul(a[0], b[0]), self.right.mul(a[1], b[1]))

    def inv(self, a):
        return (self.left.inv(a[0]), self.right.inv(a[1]))

    def nf_str(self, a) -> str:
        return f"({self.left.nf_str(a[0])})({self.right.nf_str(a[1])})"

    def parse_nf(self, s: str):
        if not (s.startswith("(") and s.endswith(")")):
            raise ValidationError(f"bad normal form {s!r} for {self.spec}")
        depth = 0
        split = -1
        for i, ch in enumerate(s):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0:
                    split = i
                    break
        if split < 0 or split + 1 >= len(s) or s[split + 1] != "(":
            raise ValidationError(f"bad normal form {s!r} for {self.spec}")
        return (self.left.parse_nf(s[1:split]),
                self.right.parse_nf(s[split + 2:-1]))


def parse_group_spec(spec: str):
    """Parse a group spec string: "z:d", "free:k", "lamplighter",
    "prod(a,b)" (nestable)."""
    spec = spec.strip()
    if spec == "lamplighter":
        return Lamplighter()
    if spec.startswith("z:"):
        return FreeAbelian(int(spec[2:]))
    if spec.startswith("free:"):
        return FreeGroup(int(spec[5:]))
    if spec.startswith("prod(") and spec.endswith(")"):
        inner = spec[5:-1]
        depth = 0
        for i, ch in enumerate(inner):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "," and depth == 0:
                return DirectProduct(parse_group_spec(inner[:i]),
                                     parse_group_spec(inner[i + 1:]))
    raise ValidationError(f"unrecognized group spec {spec!r}")


class CayleyBall:
    """Radius-R ball of a Cayley graph.

    Vertices are listed in BFS discovery order (index 0 = identity; from each
    vertex x the candidates s*x are tried with s in declaration order).
    `nbr[i][x]` is the vertex index of s_i^{-1} * x, or -1 when that element
    lies outside the ball. A vertex is interior when its word length is at
    most R-1; interior vertices have all |S| neighbors inside the ball.
    """

    def __init__(self, group, radius, elements, index, nbr, depth):
        self.group = group
        self.radius = radius
        self.elements = elements
        self.index = index
        self.nbr = nbr
        self.depth = depth
        self.interior = depth < radius
        self.id = f"{group.spec}@{radius}"

    @property
    def n_vertices(self) -> int:
        return len(self.elements)

    @property
    def n_gens(self) -> int:
        return len(self.group.gen_names)

    def interior_indices(self) -> np.ndarray:
        return np.nonzero(self.interior)[0]

    def boundary_indices(self) -> np.ndarray:
        return np.nonzero(~self.interior)[0]

    def function(self, values) -> FiniteFunction:
        f = FiniteFunction(self.id, np.asarray(values, dtype=float))
        if len(f) != self.n_vertices:
            raise ValueError(f"expected {self.n_vertices} values, got {len(f)}")
        return f

    def check_function(self, f: FiniteFunction) -> np.ndarray:
        if f.ball != self.id or len(f) != self.n_vertices:
            raise ValueError(f"function indexed by {f.ball!r} does not match "
                             f"ball {self.id!r}")
        return f.values

    def to_json_dict(self) -> dict:
        g = self.group
        return {
            "group": g.spec,
            "radius": int(self.radius),
            "vertices": [g.nf_str(x) for x in self.elements],
            "neighbors": {name: [int(j) for j in self.nbr[i]]
                          for i, name in enumerate(g.gen_names)},
        }


def build_ball(group_or_spec, radius: int, vertex_budget: int = 10 ** 6) -> CayleyBall:
    """BFS construction of the radius-R Cayley ball."""
    group = parse_group_spec(group_or_spec) if isinstance(group_or_spec, str) \
        else group_or_spec
    if radius < 0:
        raise ValueError("radius must be non-negative")
    gens = group.generators()
    e = group.identity()
    elements = [e]
    index = {e: 0}
    depth = [0]
    queue = deque([0])
    while queue:
        i = queue.popleft()
        if depth[i] >= radius:
            continue
        x = elements[i]
        for g in gens:
            y = group.mul(g, x)
            if y not in index:
                index[y] = len(elements)
                elements.append(y)
                depth.append(depth[i] + 1)
                queue.append(len(elements) - 1)
                if len(elements) > vertex_budget:
                    raise ResourceError(
                        f"ball {group.spec} radius {radius} exceeds the vertex "
                        f"budget of {vertex_budget}")
    n = len(elements)
    nbr = np.full((len(gens), n), -1, dtype=np.int32)
    for gi in range(len(gens)):
        s_inv = gens[group.inverse_index[gi]]
        row = nbr[gi]
        for i, x in enumerate(elements):
            row[i] = index.get(group.mul(s_inv, x), -1)
    return CayleyBall(group, radius, elements,
                      index, nbr, np.array(depth, dtype=np.int32))


def ball_from_json_dict(data: dict) -> CayleyBall:
    """Rebuild a ball from its serialized form (depths recomputed by BFS)."""
    group = parse_group_spec(data["group"])
    radius = int(data["radius"])
    elements = [group.parse_nf(s) for s in data["vertices"]]
    n = len(elements)
    index = {x: i for i, x in enumerate(elements)}
    if len(index) != n:
        raise ValidationError("duplicate vertices in serialized ball")
    if n == 0 or elements[0] != group.identity():
        raise ValidationError("serialized ball must start with the identity")
    names = group.gen_names
    if set(data["neighbors"]) != set(names):
        raise ValidationError("serialized neighbor maps do not match the "
                              "group's generators")
    nbr = np.empty((len(names), n), dtype=np.int32)
    for i, name in enumerate(names):
        row = np.asarray(data["neighbors"][name], dtype=np.int32)
        if row.shape != (n,) or np.any(row < -1) or np.any(row >= n):
            raise ValidationError(f"bad neighbor row for generator {name!r}")
        nbr[i] = row
    depth = np.full(n, -1, dtype=np.int32)
    depth[0] = 0
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for gi in range(len(names)):
            j = int(nbr[gi, i])
            if j >= 0 and depth[j] < 0:
                depth[j] = depth[i] + 1
                queue.append(j)
    if np.any(depth < 0):
        raise ValidationError("serialized ball is not connected")
    return CayleyBall(group, radius, elements, index, nbr, depth)


def act(ball: CayleyBall, g, f: FiniteFunction) -> tuple[FiniteFunction, np.ndarray]:
    """Permutation action (lambda(g) f)(x) = f(g^{-1} x), restricted to the
    ball; the boolean mask marks vertices where g^{-1} x stays inside."""
    values = ball.check_function(f)
    w = ball.group.inv(g)
    out = np.zeros(ball.n_vertices)
    mask = np.zeros(ball.n_vertices, dtype=bool)
    for i, x in enumerate(ball.elements):
        j = ball.index.get(ball.group.mul(w, x))
        if j is not None:
            out[i] = values[j]
            mask[i] = True
    return ball.function(out), mask


def act_generator(ball: CayleyBall, gen_idx: int, values: np.ndarray
                  ) -> tuple[np.ndarray, np.ndarray]:
    """Fast path of `act` for a single generator, via the neighbor maps."""
    row = ball.nbr[gen_idx]
    mask = row >= 0
    out = np.zeros(ball.n_vertices)
    out[mask] = values[row[mask]]
    return out, mask
