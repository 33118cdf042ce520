"""Integer program for the obstacle tracking problem: build, check, emit.

Variables (k = 1..K obstacles, l = 1..n blocked links, 1-based):

    X_k      binary, obstacle k is used
    Y_k_l    binary, link l was broken by obstacle k
    a_k_l    real, position of the crossing point along link l
    xk_k     real, x of obstacle k at t = 0
    yk_k     real, y of obstacle k at t = 0
    Ak_k     real, x velocity of obstacle k
    Bk_k     real, y velocity of obstacle k

Rows:

    cover_l      sum_k Y_k_l >= 1
    gx_k_l       |a_k_l*ub_x + (1-a_k_l)*ue_x - xk_k - t_l*Ak_k| <= (1-Y_k_l)*M
    gy_k_l       same for y
    alo_k_l      a_k_l >= -(1-Y_k_l)*M
    ahi_k_l      a_k_l <= 1 + (1-Y_k_l)*M
    link_k_l     Y_k_l <= X_k

The link's begin point ``l_b`` is its UE end and ``l_e`` its station end,
so ``a_k_l`` is the fraction of the way from the station to the UE.
The geometry rows are two-sided and gated on ``Y_k_l``; the solver never
runs here, models are only checked against given assignments and written
out in lp_solve LP format.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .world import BlockedLink, LinearMotion, Obstacle

BINARY, REAL = "binary", "real"


def var_X(k):
    return f"X_{k}"


def var_Y(k, l):
    return f"Y_{k}_{l}"


def var_a(k, l):
    return f"a_{k}_{l}"


def var_x(k):
    return f"xk_{k}"


def var_y(k):
    return f"yk_{k}"


def var_A(k):
    return f"Ak_{k}"


def var_B(k):
    return f"Bk_{k}"


@dataclass
class Row:
    """``lo <= sum(coef*var) + const <= hi``; either bound may be None.

    For ranged rows (both bounds set) the bounds are themselves affine in
    the variables; they are stored as (terms, const) pairs.
    """
    name: str
    kind: str
    terms: Dict[str, float]
    const: float = 0.0
    lo: Optional[Tuple[Dict[str, float], float]] = None
    hi: Optional[Tuple[Dict[str, float], float]] = None


@dataclass
class IlpModel:
    K: int
    links: List[BlockedLink]
    M: float
    variables: Dict[str, str] = field(default_factory=dict)
    objective: Dict[str, float] = field(default_factory=dict)
    rows: List[Row] = field(default_factory=list)

    def rows_of(self, kind):
        return [r for r in self.rows if r.kind == kind]

    @property
    def binaries(self):
        return [v for v, t in self.variables.items() if t == BINARY]


class MissingVariableError(KeyError):
    pass


def _affine(terms, const, values):
    return sum(c * values[v] for v, c in terms.items()) + const


def build_ilp(blocked: Sequence[BlockedLink], K: int, M: float = 1e6) -> IlpModel:
    if K < 1:
        raise ValueError("K must be >= 1")
    blocked = list(blocked)
    m = IlpModel(K=K, links=blocked, M=M)
    ks = range(1, K + 1)
    ls = range(1, len(blocked) + 1)
    for k in ks:
        m.variables[var_X(k)] = BINARY
        m.objective[var_X(k)] = 1.0
    for k in ks:
        for l in ls:
            m.variables[var_Y(k, l)] = BINARY
    for k in ks:
        for l in ls:
            m.variables[var_a(k, l)] = REAL
        for name in (var_x(k), var_y(k), var_A(k), var_B(k)):
            m.variables[name] = REAL

    for l in ls:
        m.rows.append(Row(f"cover_{l}", "cover", {var_Y(k, l): 1.0 for k in ks},
                          lo=({}, 1.0)))
    for k in ks:
        for l, bl in zip(ls, blocked):
            (ubx, uby), (bsx, bsy) = bl.link.seg
            t = bl.t_block
            relax = ({var_Y(k, l): M}, -M)       # -(1 - Y) * M
            slack = ({var_Y(k, l): -M}, M)       # (1 - Y) * M
            for axis, ub, be, pos, vel in (("x", ubx, bsx, var_x(k), var_A(k)),
                                           ("y", uby, bsy, var_y(k), var_B(k))):
                # a*ub + (1-a)*be - pos - t*vel
                terms = {var_a(k, l): ub - be, pos: -1.0}
                if t != 0.0:
                    terms[vel] = -t
                m.rows.append(Row(f"g{axis}_{k}_{l}", f"geometry-{axis}", terms, be,
                                  lo=relax, hi=slack))
            m.rows.append(Row(f"alo_{k}_{l}", "alpha", {var_a(k, l): 1.0}, lo=relax))
            m.rows.append(Row(f"ahi_{k}_{l}", "alpha", {var_a(k, l): 1.0},
                              hi=({var_Y(k, l): -M}, 1.0 + M)))
            m.rows.append(Row(f"link_{k}_{l}", "linking",
                              {var_Y(k, l): 1.0, var_X(k): -1.0}, hi=({}, 0.0)))
    return m


@dataclass
class CheckResult:
    ok: bool
    violated: List[str]

    def __bool__(self):
        return self.ok


def check_assignment(m: IlpModel, a: Dict[str, float], tol: float = 1e-6) -> CheckResult:
    """Evaluate every row and integrality condition at the assignment."""
    missing = [v for v in m.variables if v not in a]
    if missing:
        raise MissingVariableError(f"assignment lacks {len(missing)} variables, e.g. {missing[:3]}")
    violated = []
    for v in m.binaries:
        if min(abs(a[v]), abs(a[v] - 1.0)) > tol:
            violated.append(f"integrality:{v}")
    for r in m.rows:
        val = _affine(r.terms, r.const, a)
        if r.lo is not None and val < _affine(*r.lo, a) - tol:
            violated.append(r.name)
        elif r.hi is not None and val > _affine(*r.hi, a) + tol:
            violated.append(r.name)
    return CheckResult(not violated, violated)


def zero_assignment(m: IlpModel) -> Dict[str, float]:
    return {v: 0.0 for v in m.variables}


def crossing_fraction(bl: BlockedLink, p) -> float:
    """``a`` such that ``a*ue + (1-a)*bs == p`` for a point p on the link."""
    (ux, uy), (bx, by) = bl.link.seg
    dx, dy = ux - bx, uy - by
    den = dx * dx + dy * dy
    if den == 0.0:
        return 0.0
    return ((p[0] - bx) * dx + (p[1] - by) * dy) / den


def ground_truth_assignment(m: IlpModel, obstacles: Sequence[Obstacle],
                            owner: Sequence[int]) -> Dict[str, float]:
    """Assignment built from known linear motions.

    ``owner[l-1]`` is the index (0-based, into ``obstacles``) of the
    obstacle that broke link l. Unused obstacle slots get all-zero values.
    """
    if len(obstacles) > m.K:
        raise ValueError("more obstacles than the model's K")
    a = zero_assignment(m)
    for k, o in enumerate(obstacles, start=1):
        if not isinstance(o.motion, LinearMotion):
            raise TypeError("ground-truth assignment needs linear motion")
        if k - 1 not in owner:
            continue
        a[var_X(k)] = 1.0
        a[var_x(k)], a[var_y(k)] = o.motion.start
        a[var_A(k)], a[var_B(k)] = o.motion.velocity
    for l, (bl, k0) in enumerate(zip(m.links, owner), start=1):
        o = obstacles[k0]
        t = bl.t_block
        p = (o.motion.start.x + t * o.motion.velocity[0], o.motion.start.y + t * o.motion.velocity[1])
        a[var_Y(k0 + 1, l)] = 1.0
        a[var_a(k0 + 1, l)] = crossing_fraction(bl, p)
    return a


# --- LP text --------------------------------------------------------------

def _num(c):
    return repr(float(c))


def _expr(terms):
    parts = []
    for v, c in terms.items():
        if c == 0.0:
            continue
        parts.append(f"{'+' if c >= 0 else '-'}{_num(abs(c))} {v}")
    return " ".join(parts) if parts else "0"


def _le(name, terms, const, bound):
    # terms + const <= bterms + bconst  ->  (terms - bterms) <= bconst - const
    bterms, bconst = bound
    lhs = dict(terms)
    for v, c in bterms.items():
        lhs[v] = lhs.get(v, 0.0) - c
    return f"{name}: {_expr(lhs)} <= {_num(bconst - const)};"


def _ge(name, terms, const, bound):
    bterms, bconst = bound
    lhs = dict(terms)
    for v, c in bterms.items():
        lhs[v] = lhs.get(v, 0.0) - c
    return f"{name}: {_expr(lhs)} >= {_num(bconst - const)};"


def emit_lp(m: IlpModel) -> str:
    """lp_solve LP-format text for the model.

    A ranged row ``r`` is written as two inequalities ``r_lo`` and ``r_hi``.
    Real variables are declared free; binaries one ``bin`` line each.
    """
    out = ["/* obstacle tracking ILP */", f"/* K = {m.K}, links = {len(m.links)}, M = {_num(m.M)} */",
           "", f"min: {_expr(m.objective)};", ""]
    for r in m.rows:
        if r.lo is not None and r.hi is not None:
            out.append(_ge(r.name + "_lo", r.terms, r.const, r.lo))
            out.append(_le(r.name + "_hi", r.terms, r.const, r.hi))
        elif r.lo is not None:
            out.append(_ge(r.name, r.terms, r.const, r.lo))
        else:
            out.append(_le(r.name, r.terms, r.const, r.hi))
    reals = [v for v, t in m.variables.items() if t == REAL]
    out.append("")
    if reals:
        out.append(f"free {', '.join(reals)};")
    for v in m.binaries:
        out.append(f"bin {v};")
    return "\n".join(out) + "\n"
