"""Independent reference computations shared by several test modules."""
from rmk3.ffield import build_extension
from rmk3.surface import reduce_mod_p


def nodes_by_search(X, p):
    """Roots of the three forms and the cross points of the six lines, by exhaustive search over F_{p^2}.

    Returns ((#roots of q1, q2, q3), set of cross points as code pairs, prime-field flags).
    """
    F = build_extension(p, 2)
    elems = list(F.elements())

    def roots(form):
        a, b, c = (F.element(v) for v in form)
        return [r for r in elems if (a * r * r + b * r + c).is_zero()]

    Xp = reduce_mod_p(X, p)
    r, s, u = (roots(f) for f in Xp.forms)
    pts = set()
    for ri in r:
        for sj in s:
            pts.add((sj.to_int(), ri.to_int()))
        for uk in u:
            pts.add(((uk * ri).to_int(), ri.to_int()))
    for sj in s:
        for uk in u:
            if not uk.is_zero():
                pts.add((sj.to_int(), (sj / uk).to_int()))
    return (len(r), len(s), len(u)), pts


def rational_node_count(X, p):
    """e1, e2, e3 plus the cross points with both coordinates in F_p (codes below p)."""
    _, pts = nodes_by_search(X, p)
    return 3 + sum(1 for x, y in pts if x < p and y < p)
