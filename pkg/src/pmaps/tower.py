"""Tracking the pair (xi_l(y), T^l xi_l(y)) along one orbit.

``C_l`` is the l-cylinder of the base point and ``D_l`` its image under the
l-fold composition. Advancing clips ``D_l`` to the branch containing
``T^l y``; a clip that actually removes something is a *cut*. A step where the
closure of ``C_l`` sits inside ``D_l`` is a *covering time*: the composition
then has a fixed point in ``C_l``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from pmaps.errors import CriticalPoint
from pmaps.maps import Interval, PiecewiseMonotonicMap
from pmaps.symbolic import Cylinder, forward_image, pull_back

DEFAULT_MARGIN = 1e-9
BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class TowerTracker:
    map: PiecewiseMonotonicMap = field(repr=False)
    y: object
    l: int
    word: tuple
    C: Interval
    D: Interval
    orientation: int
    cut_flags: tuple = ()
    point: object = None  # T^l y

    @property
    def cylinder(self) -> Cylinder:
        return Cylinder(self.word, self.C)

    def is_covering(self, margin=DEFAULT_MARGIN) -> bool:
        C, D = self.C, self.D
        # strict even when margin == 0: the closure of C must sit inside open D
        return D.lo < C.lo and C.hi < D.hi and D.lo + margin <= C.lo and C.hi <= D.hi - margin

    def boundary_hits_critical(self, tol=BOUNDARY_TOL) -> bool:
        T = self.map
        return any(
            abs(e - c) <= tol for e in (self.D.lo, self.D.hi) for c in T.critical_points
        )


def init_tracker(T: PiecewiseMonotonicMap, y) -> TowerTracker:
    y = T.coerce(y)
    i = T.branch_of(y)
    b = T.branches[i]
    return TowerTracker(
        map=T,
        y=y,
        l=1,
        word=(i,),
        C=b.domain,
        D=b.image,
        orientation=1 if b.increasing else -1,
        point=b(y),
    )


def advance(state: TowerTracker) -> TowerTracker:
    """Step from l to l+1, recording whether the clip of ``D_l`` was a cut."""
    T = state.map
    z = state.point
    try:
        i = T.branch_of(z)
    except CriticalPoint as exc:
        raise CriticalPoint(exc.x, state.l, exc.distance) from None
    b = T.branches[i]
    clipped = state.D.intersect(b.domain)
    cut = clipped != state.D
    if clipped is None:  # only reachable through rounding in float mode
        raise CriticalPoint(z, state.l, T.critical_distance(z))
    C = state.C
    if cut:
        C = pull_back(T, state.word, clipped)
        if C is None:
            raise CriticalPoint(z, state.l, T.critical_distance(z))
    return replace(
        state,
        l=state.l + 1,
        word=state.word + (i,),
        C=C,
        D=forward_image(T, i, clipped),
        orientation=state.orientation * (1 if b.increasing else -1),
        cut_flags=state.cut_flags + (cut,),
        point=b(z),
    )


def track(T: PiecewiseMonotonicMap, y, l_max: int):
    """Yield trackers for l = 1..l_max (stops early on a critical hit)."""
    if l_max < 1:
        return
    state = init_tracker(T, y)
    yield state
    while state.l < l_max:
        state = advance(state)
        yield state


@dataclass(frozen=True)
class CoveringTime:
    l: int
    C: Interval
    D: Interval
    word: tuple
    orientation: int

    @property
    def cylinder(self) -> Cylinder:
        return Cylinder(self.word, self.C)


@dataclass
class CoveringScan:
    """Covering times found by a scan; ``truncated`` is set if an orbit point hit C."""

    hits: list
    truncated: bool = False
    truncated_at: int | None = None

    def __iter__(self):
        return iter(self.hits)

    def __len__(self):
        return len(self.hits)

    def __getitem__(self, k):
        return self.hits[k]

    @property
    def times(self):
        return [h.l for h in self.hits]


def covering_times(T: PiecewiseMonotonicMap, y, l_max: int, margin=DEFAULT_MARGIN) -> CoveringScan:
    if margin < 0:
        raise ValueError("margin must be nonnegative")
    scan = CoveringScan([])
    try:
        for st in track(T, y, l_max):
            if st.is_covering(margin):
                scan.hits.append(CoveringTime(st.l, st.C, st.D, st.word, st.orientation))
    except CriticalPoint as exc:
        scan.truncated = True
        scan.truncated_at = exc.step
    return scan


def cut_times(T: PiecewiseMonotonicMap, y, l_max: int):
    """Steps l <= l_max at which clipping ``D_l`` to the branch of ``T^l y`` was strict."""
    st = None
    for st in track(T, y, l_max):
        pass
    if st is None:
        return []
    st = advance(st)
    return [l for l, flag in enumerate(st.cut_flags, start=1) if flag]


def boundary_critical_times(T: PiecewiseMonotonicMap, y, l_max: int, tol=BOUNDARY_TOL):
    """Steps l <= l_max with an endpoint of ``D_l`` within ``tol`` of C."""
    return [st.l for st in track(T, y, l_max) if st.boundary_hits_critical(tol)]
